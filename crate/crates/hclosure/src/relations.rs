//! Finite binary relations over an indexed universe, with checkable
//! certificates for well-foundedness, loop-freeness, and termination.
//!
//! A universe of size `n` is the index set `[0, n)`. A pair `(a, b)` states
//! that `a` is related to `b`; a descending chain read left to right steps
//! from an element down to a successor, so the chain step from `b` to `a`
//! corresponds to the pair `(a, b)`. Decreasing transitive lists ("H-lists")
//! follow the same convention: every later element is related to every
//! earlier one.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("element {element} out of range for universe size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("universe size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("union of zero relations has no universe size")]
    EmptyUnion,
    #[error("relation is cyclic (cycle {cycle:?})")]
    CyclicInput { cycle: Vec<usize> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

// ---- Relation ----

/// A finite binary relation: a universe `[0, size)` plus a set of ordered
/// pairs. Pairs are kept sorted and deduplicated, so membership is a binary
/// search and every iteration order, witness, and serialization derived
/// from a relation is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    size: usize,
    pairs: Vec<(usize, usize)>,
}

impl Relation {
    /// Builds a relation, deduplicating pairs and rejecting out-of-range
    /// elements.
    pub fn new(
        size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Relation, RelationError> {
        let mut out = Vec::new();
        for (a, b) in pairs {
            for e in [a, b] {
                if e >= size {
                    return Err(RelationError::OutOfRange { element: e, size });
                }
            }
            out.push((a, b));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Relation { size, pairs: out })
    }

    pub fn empty(size: usize) -> Relation {
        Relation { size, pairs: Vec::new() }
    }

    /// Samples a relation where each ordered pair is present with
    /// probability 1/2.
    pub fn random(rng: &mut impl rand::Rng, size: usize) -> Relation {
        let mut pairs = Vec::new();
        for a in 0..size {
            for b in 0..size {
                if rng.gen::<bool>() {
                    pairs.push((a, b));
                }
            }
        }
        Relation { size, pairs }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.size == other.size
            && self.pairs.iter().all(|p| other.pairs.binary_search(p).is_ok())
    }

    /// Union of one or more relations over a shared universe.
    pub fn union(rs: &[Relation]) -> Result<Relation, RelationError> {
        let first = rs.first().ok_or(RelationError::EmptyUnion)?;
        let mut out = first.clone();
        for r in &rs[1..] {
            if r.size != first.size {
                return Err(RelationError::SizeMismatch { expected: first.size, got: r.size });
            }
            out.pairs.extend_from_slice(&r.pairs);
        }
        out.pairs.sort_unstable();
        out.pairs.dedup();
        Ok(out)
    }

    /// Start of each first coordinate's block in `pairs`, so the pairs out
    /// of `p` are the slice `pairs[offsets[p]..offsets[p + 1]]`.
    fn row_offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0usize; self.size + 1];
        for &(p, _) in &self.pairs {
            offsets[p + 1] += 1;
        }
        for p in 0..self.size {
            offsets[p + 1] += offsets[p];
        }
        offsets
    }

    /// Product relation on the universe `[0, self.size * other.size)`,
    /// encoded through [`ProductElement`]. A product pair steps in the left
    /// coordinate, in the right coordinate, or in both at once. Pairs are
    /// emitted source by source in encoding order, so no global sort is
    /// needed.
    pub fn product(&self, other: &Relation) -> Relation {
        let n2 = other.size;
        let enc = |left: usize, right: usize| ProductElement { left, right }.encode(n2);
        let off1 = self.row_offsets();
        let off2 = other.row_offsets();
        let mut pairs = Vec::new();
        let mut targets = Vec::new();
        for a in 0..self.size {
            let steps1 = &self.pairs[off1[a]..off1[a + 1]];
            for b in 0..n2 {
                let steps2 = &other.pairs[off2[b]..off2[b + 1]];
                targets.clear();
                for &(_, b2) in steps2 {
                    targets.push(enc(a, b2));
                }
                for &(_, a2) in steps1 {
                    targets.push(enc(a2, b));
                    for &(_, b2) in steps2 {
                        targets.push(enc(a2, b2));
                    }
                }
                targets.sort_unstable();
                targets.dedup();
                let source = enc(a, b);
                pairs.extend(targets.iter().map(|&t| (source, t)));
            }
        }
        Relation { size: self.size * n2, pairs }
    }

    /// Adjoins a fresh top element: the universe grows by one, and every old
    /// element is related to the new top. The top is element `self.size()` of
    /// the result and has no outgoing pairs.
    pub fn successor(&self) -> Relation {
        let top = self.size;
        let mut pairs = Vec::with_capacity(self.pairs.len() + self.size);
        let mut old = self.pairs.iter().copied().peekable();
        for x in 0..self.size {
            // Every old pair out of x sorts before (x, top).
            while let Some(p) = old.next_if(|&p| p < (x, top)) {
                pairs.push(p);
            }
            pairs.push((x, top));
        }
        Relation { size: self.size + 1, pairs }
    }

    fn reach_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.size;
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in &self.pairs {
            reach[a][b] = true;
        }
        for k in 0..n {
            for a in 0..n {
                if reach[a][k] {
                    for b in 0..n {
                        if reach[k][b] {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    /// Smallest transitive relation containing this one.
    pub fn transitive_closure(&self) -> Relation {
        let reach = self.reach_matrix();
        let mut pairs = Vec::new();
        for a in 0..self.size {
            for b in 0..self.size {
                if reach[a][b] {
                    pairs.push((a, b));
                }
            }
        }
        Relation { size: self.size, pairs }
    }

    /// True if `to` is reachable from `from` without passing through a
    /// blocked vertex (the endpoints themselves may be blocked).
    fn reaches_avoiding(&self, from: usize, to: usize, blocked: &[bool]) -> bool {
        let mut seen = vec![false; self.size];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for v in 0..self.size {
                if !self.contains(u, v) {
                    continue;
                }
                if v == to {
                    return true;
                }
                if !blocked[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Finds a cycle `c0 c1 ... ck` with `c0 = ck`, `k >= 1`, and every step
    /// `(ci, ci+1)` in the relation, or `None` if the relation is acyclic.
    /// Deterministic: the start is the smallest element lying on any cycle,
    /// and the cycle is the lexicographically smallest simple cycle from it.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let reach = self.reach_matrix();
        let start = (0..self.size).find(|&x| reach[x][x])?;
        let mut path = vec![start];
        let mut used = vec![false; self.size];
        used[start] = true;
        loop {
            let cur = *path.last().expect("path is never empty");
            let mut chosen = None;
            for y in 0..self.size {
                if !self.contains(cur, y) {
                    continue;
                }
                if y == start || (!used[y] && self.reaches_avoiding(y, start, &used)) {
                    chosen = Some(y);
                    break;
                }
            }
            let y = chosen.expect("some step back to the cycle start must remain");
            path.push(y);
            if y == start {
                return Some(path);
            }
            used[y] = true;
        }
    }

    /// Smallest element related to itself, if any.
    pub fn find_loop(&self) -> Option<usize> {
        (0..self.size).find(|&x| self.contains(x, x))
    }

    /// Height of each element: the length in edges of the longest descending
    /// chain from it, i.e. the longest path ending at it when pairs are read
    /// as edges. Errors on cyclic input, reporting a cycle.
    pub fn height_map(&self) -> Result<Vec<usize>, RelationError> {
        if let Some(cycle) = self.find_cycle() {
            return Err(RelationError::CyclicInput { cycle });
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.size];
        for &(a, b) in &self.pairs {
            preds[b].push(a);
        }
        let mut memo: Vec<Option<usize>> = vec![None; self.size];
        fn height(x: usize, preds: &[Vec<usize>], memo: &mut [Option<usize>]) -> usize {
            if let Some(h) = memo[x] {
                return h;
            }
            let h = preds[x]
                .iter()
                .map(|&y| height(y, preds, memo) + 1)
                .max()
                .unwrap_or(0);
            memo[x] = Some(h);
            h
        }
        Ok((0..self.size).map(|x| height(x, &preds, &mut memo)).collect())
    }

    /// True if `l` is a decreasing transitive list: every later element is
    /// related to every earlier one. Empty and singleton lists qualify.
    pub fn is_h_list(&self, l: &[usize]) -> Result<bool, RelationError> {
        Ok(self.h_list_violation(l)?.is_none())
    }

    /// The first position pair `(i, j)` with `i < j` (in lexicographic
    /// order) whose elements break the decreasing transitive condition, or
    /// none when `l` is a valid list.
    pub fn h_list_violation(&self, l: &[usize]) -> Result<Option<(usize, usize)>, RelationError> {
        for &x in l {
            if x >= self.size {
                return Err(RelationError::OutOfRange { element: x, size: self.size });
            }
        }
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                if !self.contains(l[j], l[i]) {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    /// All decreasing transitive lists of length at most `max_len`, ordered
    /// by length and then lexicographically. This order is the canonical
    /// indexing of the bounded fragment.
    pub fn enumerate_h_lists(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for l in &frontier {
                // Appending y keeps the list decreasing transitive exactly
                // when y is related to every element already present.
                for y in 0..self.size {
                    if l.iter().all(|&x| self.contains(y, x)) {
                        let mut e = l.clone();
                        e.push(y);
                        next.push(e);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    // ---- text format ----

    /// Parses the relation text format: a `size N` header line, then one
    /// `a b` pair per line. Blank lines and lines starting with `#` are
    /// ignored. Errors carry 1-based line numbers.
    pub fn parse_text(input: &str) -> Result<Relation, RelationError> {
        let mut size: Option<usize> = None;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            match size {
                None => {
                    if fields.len() != 2 || fields[0] != "size" {
                        return Err(RelationError::Parse {
                            line,
                            message: format!("expected `size N` header, found `{text}`"),
                        });
                    }
                    let n = fields[1].parse::<usize>().map_err(|_| RelationError::Parse {
                        line,
                        message: format!("invalid universe size `{}`", fields[1]),
                    })?;
                    size = Some(n);
                }
                Some(n) => {
                    if fields.len() != 2 {
                        return Err(RelationError::Parse {
                            line,
                            message: format!("expected `a b` pair, found `{text}`"),
                        });
                    }
                    let mut pair = [0usize; 2];
                    for (slot, field) in pair.iter_mut().zip(&fields) {
                        *slot = field.parse::<usize>().map_err(|_| RelationError::Parse {
                            line,
                            message: format!("invalid element `{field}`"),
                        })?;
                    }
                    let (a, b) = (pair[0], pair[1]);
                    if a >= n || b >= n {
                        return Err(RelationError::Parse {
                            line,
                            message: format!("pair ({a}, {b}) out of range for size {n}"),
                        });
                    }
                    pairs.push((a, b));
                }
            }
        }
        match size {
            None => Err(RelationError::Parse {
                line: input.lines().count() + 1,
                message: "missing `size N` header".to_string(),
            }),
            Some(n) => Relation::new(n, pairs),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("size {}\n", self.size);
        for (a, b) in self.pairs() {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {} {{", self.size)?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

// ---- product element encoding ----

/// A point of a product universe. `left` indexes the left factor, `right`
/// the right factor; the flat encoding is `left * right_size + right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductElement {
    pub left: usize,
    pub right: usize,
}

impl ProductElement {
    pub fn encode(&self, right_size: usize) -> usize {
        self.left * right_size + self.right
    }

    /// Inverse of [`encode`](Self::encode). `right_size` must be nonzero: an
    /// empty right factor yields an empty product with nothing to decode.
    pub fn decode(index: usize, right_size: usize) -> ProductElement {
        assert!(right_size > 0, "cannot decode into an empty right factor");
        ProductElement { left: index / right_size, right: index % right_size }
    }
}

// ---- certificates ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    WellFounded,
    NotWellFounded,
    HWellFounded,
    NotHWellFounded,
    Terminating,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::WellFounded => "well-founded",
            Verdict::NotWellFounded => "not-well-founded",
            Verdict::HWellFounded => "h-well-founded",
            Verdict::NotHWellFounded => "not-h-well-founded",
            Verdict::Terminating => "terminating",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn from_str_name(s: &str) -> Option<Verdict> {
        Some(match s {
            "well-founded" => Verdict::WellFounded,
            "not-well-founded" => Verdict::NotWellFounded,
            "h-well-founded" => Verdict::HWellFounded,
            "not-h-well-founded" => Verdict::NotHWellFounded,
            "terminating" => Verdict::Terminating,
            "unknown" => Verdict::Unknown,
            _ => return None,
        })
    }

    /// Affirmative verdicts map to process exit code 0, everything else to 1.
    pub fn is_affirmative(&self) -> bool {
        matches!(self, Verdict::WellFounded | Verdict::HWellFounded | Verdict::Terminating)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evidence attached to a certificate. Every witness is cheap to re-check
/// against the relation it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A cycle `c0 ... ck` with `c0 = ck` and every step in the relation.
    Cycle(Vec<usize>),
    /// An element related to itself.
    Loop(usize),
    /// Element-indexed heights certifying well-foundedness.
    HeightMap(Vec<usize>),
    /// A transitive-closure pair not covered by the candidate union.
    UncoveredPair(usize, usize),
    /// A looping element inside the `index`-th candidate relation.
    RelationLoop { index: usize, element: usize },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Cycle(_) => "cycle",
            Witness::Loop(_) => "loop",
            Witness::HeightMap(_) => "height-map",
            Witness::UncoveredPair(_, _) => "uncovered-pair",
            Witness::RelationLoop { .. } => "relation-loop",
        }
    }

    fn to_value(&self) -> serde_json::Value {
        match self {
            Witness::Cycle(c) => serde_json::json!(c),
            Witness::Loop(x) => serde_json::json!(x),
            Witness::HeightMap(h) => serde_json::json!(h),
            Witness::UncoveredPair(a, b) => serde_json::json!([a, b]),
            Witness::RelationLoop { index, element } => {
                serde_json::json!({ "index": index, "element": element })
            }
        }
    }

    fn from_parts(kind: &str, value: serde_json::Value) -> Result<Witness, String> {
        let bad = |what: &str| format!("invalid `{kind}` witness: {what}");
        match kind {
            "cycle" => serde_json::from_value(value)
                .map(Witness::Cycle)
                .map_err(|e| bad(&e.to_string())),
            "loop" => serde_json::from_value(value)
                .map(Witness::Loop)
                .map_err(|e| bad(&e.to_string())),
            "height-map" => serde_json::from_value(value)
                .map(Witness::HeightMap)
                .map_err(|e| bad(&e.to_string())),
            "uncovered-pair" => {
                let pair: [usize; 2] =
                    serde_json::from_value(value).map_err(|e| bad(&e.to_string()))?;
                Ok(Witness::UncoveredPair(pair[0], pair[1]))
            }
            "relation-loop" => {
                #[derive(Deserialize)]
                struct Repr {
                    index: usize,
                    element: usize,
                }
                let r: Repr = serde_json::from_value(value).map_err(|e| bad(&e.to_string()))?;
                Ok(Witness::RelationLoop { index: r.index, element: r.element })
            }
            _ => Err(format!("unknown witness kind `{kind}`")),
        }
    }
}

/// A verdict plus optional supporting witness. Serializes to the JSON object
/// `{verdict, witness_kind, witness}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl Certificate {
    pub fn new(verdict: Verdict, witness: Option<Witness>) -> Certificate {
        Certificate { verdict, witness }
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Certificate", 3)?;
        s.serialize_field("verdict", self.verdict.as_str())?;
        match &self.witness {
            Some(w) => {
                s.serialize_field("witness_kind", w.kind())?;
                s.serialize_field("witness", &w.to_value())?;
            }
            None => {
                s.serialize_field("witness_kind", &Option::<&str>::None)?;
                s.serialize_field("witness", &Option::<u8>::None)?;
            }
        }
        s.end()
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Certificate, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            verdict: String,
            #[serde(default)]
            witness_kind: Option<String>,
            #[serde(default)]
            witness: Option<serde_json::Value>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let verdict = Verdict::from_str_name(&repr.verdict)
            .ok_or_else(|| D::Error::custom(format!("unknown verdict `{}`", repr.verdict)))?;
        let witness = match (repr.witness_kind, repr.witness) {
            (None, None) | (None, Some(serde_json::Value::Null)) => None,
            (Some(kind), Some(value)) => {
                Some(Witness::from_parts(&kind, value).map_err(D::Error::custom)?)
            }
            (Some(kind), None) => {
                return Err(D::Error::custom(format!("witness kind `{kind}` without witness")))
            }
            (None, Some(_)) => return Err(D::Error::custom("witness without witness kind")),
        };
        Ok(Certificate { verdict, witness })
    }
}

// ---- finite checks ----

/// Well-foundedness at finite scale: acyclicity. Positive verdicts carry the
/// height map, negative ones a cycle.
pub fn is_well_founded_finite(r: &Relation) -> Certificate {
    match r.find_cycle() {
        Some(cycle) => Certificate::new(Verdict::NotWellFounded, Some(Witness::Cycle(cycle))),
        None => {
            let heights = r.height_map().expect("acyclic relation has a height map");
            Certificate::new(Verdict::WellFounded, Some(Witness::HeightMap(heights)))
        }
    }
}

/// H-well-foundedness at finite scale: loop-freeness. A loop pumps a
/// decreasing transitive list forever, and is the only way one can grow
/// without bound over a finite universe.
pub fn is_h_well_founded_finite(t: &Relation) -> Certificate {
    match t.find_loop() {
        Some(x) => Certificate::new(Verdict::NotHWellFounded, Some(Witness::Loop(x))),
        None => Certificate::new(Verdict::HWellFounded, None),
    }
}

/// Checks closure under finite union: the union of the given relations is
/// loop-free exactly when every piece is. Both sides are computed
/// independently and compared; disagreement is impossible and reported as an
/// internal error. Returns the union's certificate.
pub fn check_h_closure(ts: &[Relation]) -> Result<Certificate, RelationError> {
    let u = Relation::union(ts)?;
    let union_loop = u.find_loop();
    let piece_loop = ts.iter().find_map(|t| t.find_loop());
    if union_loop.is_some() != piece_loop.is_some() {
        return Err(RelationError::Inconsistent(format!(
            "union loop {union_loop:?} disagrees with piece loop {piece_loop:?}"
        )));
    }
    Ok(is_h_well_founded_finite(&u))
}

/// Disjunctive termination check: `step` is certified terminating when its
/// transitive closure is covered by the union of the candidate pieces and
/// every piece is loop-free. A failed check is inconclusive, so the negative
/// verdict is `unknown`, with the smallest uncovered closure pair or the
/// first looping piece as witness.
pub fn check_disjunctive_termination(
    step: &Relation,
    ts: &[Relation],
) -> Result<Certificate, RelationError> {
    for t in ts {
        if t.size() != step.size() {
            return Err(RelationError::SizeMismatch { expected: step.size(), got: t.size() });
        }
    }
    let mut cover = Relation::empty(step.size());
    for t in ts {
        cover = Relation::union(&[cover, t.clone()])?;
    }
    let closure = step.transitive_closure();
    if let Some((a, b)) = closure.pairs().find(|&(a, b)| !cover.contains(a, b)) {
        return Ok(Certificate::new(Verdict::Unknown, Some(Witness::UncoveredPair(a, b))));
    }
    for (index, t) in ts.iter().enumerate() {
        if let Some(element) = t.find_loop() {
            return Ok(Certificate::new(
                Verdict::Unknown,
                Some(Witness::RelationLoop { index, element }),
            ));
        }
    }
    Ok(Certificate::new(Verdict::Terminating, None))
}
