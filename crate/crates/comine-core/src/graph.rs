//! Timestamped directed graphs: parsing, exact decimal timestamps, and a
//! time-sorted CSR index.
//!
//! The index is what makes backtracking search cheap: edges are sorted
//! globally by `(timestamp, input rank)` and renumbered densely, so edge ids
//! extend the temporal order.  Per-source out-edge lists store those ids in
//! ascending order, which means they are *simultaneously* sorted by id and by
//! timestamp.  Every candidate set the miner ever needs — "edges after id `x`
//! no later than time `t`", globally or out of one vertex — is therefore a
//! contiguous range found by two binary searches.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

/// Graph vertex identifier (dense, `0..num_vertices`).
pub type VertexId = u32;
/// Graph edge identifier (dense, `0..num_edges`, ascending in time order).
pub type EdgeId = u32;
/// Scaled integer timestamp.  A graph with scale `k` stores `10^-k` units.
pub type Time = i64;

/// A directed edge `src → dst` active at time `t`.
///
/// `id` doubles as the edge's position in the time-sorted edge array, so
/// comparing ids compares `(t, input rank)` lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalEdge {
    /// Dense id; equals the index into [`TemporalGraph::edges`].
    pub id: EdgeId,
    /// Source vertex.
    pub src: VertexId,
    /// Destination vertex.
    pub dst: VertexId,
    /// Scaled timestamp.
    pub t: Time,
}

/// An exact decimal time value, kept as `mantissa · 10^-frac_len`.
///
/// Timestamps and window lengths are parsed into this form and only converted
/// to scaled integers once the graph's scale is known, so `1.5` at scale 3 is
/// exactly `1500` with no float rounding on the way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeLiteral {
    mantissa: i64,
    frac_len: u32,
}

/// Why a time literal could not be parsed or scaled.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    /// The token is not a plain decimal number.
    #[error("malformed time literal `{0}`")]
    Malformed(String),
    /// The literal does not fit in the 64-bit scaled representation.
    #[error("time literal `{0}` overflows the scaled representation")]
    Overflow(String),
    /// The literal has more fractional digits than the graph's declared scale.
    #[error("time literal `{literal}` has {frac} fractional digits but the scale allows {scale}")]
    ExcessPrecision {
        /// Offending literal as written.
        literal: String,
        /// Fractional digits present.
        frac: u32,
        /// Fractional digits permitted by the scale.
        scale: u32,
    },
}

impl TimeLiteral {
    /// Parses a decimal literal: optional sign, digits, optional `.digits`.
    pub fn parse(token: &str) -> Result<Self, TimeError> {
        let bad = || TimeError::Malformed(token.to_string());
        let overflow = || TimeError::Overflow(token.to_string());
        let (neg, body) = match token.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, token),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits_of = |s: &str| -> Result<(), TimeError> {
            if s.chars().all(|c| c.is_ascii_digit()) {
                Ok(())
            } else {
                Err(bad())
            }
        };
        digits_of(int_part)?;
        digits_of(frac_part)?;
        let mut mantissa: i64 = 0;
        for c in int_part.chars().chain(frac_part.chars()) {
            mantissa = mantissa
                .checked_mul(10)
                .and_then(|m| m.checked_add((c as u8 - b'0') as i64))
                .ok_or_else(overflow)?;
        }
        if neg {
            mantissa = -mantissa;
        }
        Ok(TimeLiteral {
            mantissa,
            frac_len: frac_part.len() as u32,
        })
    }

    /// Converts to a scaled integer for a graph with `scale` fractional
    /// digits.  Fails if the literal is finer-grained than the scale or the
    /// result overflows.
    pub fn to_scaled(self, scale: u32) -> Result<Time, TimeError> {
        if self.frac_len > scale {
            return Err(TimeError::ExcessPrecision {
                literal: self.display(),
                frac: self.frac_len,
                scale,
            });
        }
        let mut v = self.mantissa;
        for _ in 0..(scale - self.frac_len) {
            v = v
                .checked_mul(10)
                .ok_or_else(|| TimeError::Overflow(self.display()))?;
        }
        Ok(v)
    }

    /// True for values strictly greater than zero.
    pub fn is_positive(self) -> bool {
        self.mantissa > 0
    }

    /// Renders the literal back to decimal text.
    pub fn display(self) -> String {
        if self.frac_len == 0 {
            return self.mantissa.to_string();
        }
        let neg = self.mantissa < 0;
        let digits = self.mantissa.unsigned_abs().to_string();
        let fl = self.frac_len as usize;
        let (int, frac) = if digits.len() > fl {
            let split = digits.len() - fl;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            let mut f = String::new();
            for _ in 0..(fl - digits.len()) {
                f.push('0');
            }
            f.push_str(&digits);
            ("0".to_string(), f)
        };
        let sign = if neg { "-" } else { "" };
        alloc::format!("{sign}{int}.{frac}")
    }
}

/// Errors from [`parse_edge_list`], each naming the 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// A data line did not have exactly three fields.
    #[error("line {line}: expected `src dst t`, found {found} fields")]
    FieldCount {
        /// 1-based line number.
        line: usize,
        /// Number of fields found.
        found: usize,
    },
    /// A timestamp failed to parse or scale.
    #[error("line {line}: {source}")]
    Time {
        /// 1-based line number.
        line: usize,
        /// Underlying time error.
        source: TimeError,
    },
    /// A malformed or misplaced `#scale` header.
    #[error("line {line}: {msg}")]
    Scale {
        /// 1-based line number.
        line: usize,
        /// What was wrong with the header.
        msg: String,
    },
}

/// Result of [`parse_edge_list`]: triples in input order plus naming metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedEdgeList {
    /// `(src, dst, t)` in input order; `t` already scaled.
    pub triples: Vec<(VertexId, VertexId, Time)>,
    /// Original vertex names when the input used non-numeric tokens, indexed
    /// by vertex id.  `None` when every token was a plain integer id.
    pub labels: Option<Vec<String>>,
    /// Declared fractional digits (`#scale k`), default 0.
    pub scale: u32,
}

impl ParsedEdgeList {
    /// Builds the indexed graph, carrying labels and scale along.
    pub fn into_graph(self) -> TemporalGraph {
        let mut g = TemporalGraph::from_triples(&self.triples);
        g.labels = self.labels;
        g.scale = self.scale;
        g
    }
}

/// Parses the plain-text edge-list format.
///
/// One edge per line: `src dst t`, separated by whitespace or commas.  Blank
/// lines and `#`-comments are skipped.  An optional `#scale k` header before
/// the first data line declares `k` fractional timestamp digits.  Vertex
/// tokens that are all plain non-negative integers are used as ids directly;
/// otherwise every token is interned in first-appearance order and the
/// original names are kept as labels.
pub fn parse_edge_list(input: &str) -> Result<ParsedEdgeList, ParseError> {
    let mut rows: Vec<(&str, &str, TimeLiteral, usize)> = Vec::new();
    let mut scale: Option<u32> = None;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("scale") {
                if !rows.is_empty() {
                    return Err(ParseError::Scale {
                        line: line_no,
                        msg: "`#scale` must appear before the first edge".to_string(),
                    });
                }
                if scale.is_some() {
                    return Err(ParseError::Scale {
                        line: line_no,
                        msg: "duplicate `#scale` header".to_string(),
                    });
                }
                let value = words.next().and_then(|w| w.parse::<u32>().ok());
                match value {
                    Some(k) if k <= 9 && words.next().is_none() => scale = Some(k),
                    _ => {
                        return Err(ParseError::Scale {
                            line: line_no,
                            msg: "expected `#scale k` with k in 0..=9".to_string(),
                        })
                    }
                }
            }
            continue;
        }
        let mut fields = line.split(|c: char| c == ',' || c.is_whitespace());
        let mut take = || fields.by_ref().find(|f| !f.is_empty());
        let (a, b, c) = match (take(), take(), take()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            (a, b, c) => {
                let found = [a, b, c].iter().filter(|f| f.is_some()).count();
                return Err(ParseError::FieldCount {
                    line: line_no,
                    found,
                });
            }
        };
        if take().is_some() {
            return Err(ParseError::FieldCount {
                line: line_no,
                found: 4,
            });
        }
        let t = TimeLiteral::parse(c).map_err(|source| ParseError::Time {
            line: line_no,
            source,
        })?;
        rows.push((a, b, t, line_no));
    }

    let scale = scale.unwrap_or(0);
    let numeric = rows
        .iter()
        .all(|(a, b, _, _)| a.parse::<VertexId>().is_ok() && b.parse::<VertexId>().is_ok());

    // Queries and test graphs are small; linear interning keeps this
    // dependency-free.  File loading in the std crate goes through the
    // binary cache for big graphs anyway.
    fn intern_id<'a>(tok: &'a str, intern: &mut Vec<(&'a str, VertexId)>) -> VertexId {
        if let Some(&(_, id)) = intern.iter().find(|(s, _)| *s == tok) {
            return id;
        }
        let id = intern.len() as VertexId;
        intern.push((tok, id));
        id
    }
    let mut triples = Vec::with_capacity(rows.len());
    let mut labels: Option<Vec<String>> = None;
    let mut intern: Vec<(&str, VertexId)> = Vec::new();
    for (a, b, t, line_no) in &rows {
        let (src, dst) = if numeric {
            (a.parse::<VertexId>().unwrap(), b.parse::<VertexId>().unwrap())
        } else {
            (intern_id(a, &mut intern), intern_id(b, &mut intern))
        };
        let t = t.to_scaled(scale).map_err(|source| ParseError::Time {
            line: *line_no,
            source,
        })?;
        triples.push((src, dst, t));
    }
    if !numeric {
        labels = Some(intern.iter().map(|(s, _)| s.to_string()).collect());
    }
    Ok(ParsedEdgeList {
        triples,
        labels,
        scale,
    })
}

/// Which array a candidate range indexes into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CandSpace {
    /// Positions in the global time-sorted edge array (position == edge id).
    Global,
    /// Absolute positions in the flattened per-source out-edge array.
    Out,
}

/// A contiguous half-open candidate range `[lo, hi)` in one of the two edge
/// orderings.  Produced by the index, consumed one position at a time by the
/// miner and the parallel runtime (which splits ranges when rebalancing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CandRange {
    /// Ordering the positions refer to.
    pub space: CandSpace,
    /// First position (inclusive).
    pub lo: u32,
    /// One past the last position.
    pub hi: u32,
}

impl CandRange {
    /// Number of candidate positions.
    pub fn len(self) -> u32 {
        self.hi.saturating_sub(self.lo)
    }

    /// True when no positions remain.
    pub fn is_empty(self) -> bool {
        self.hi <= self.lo
    }
}

/// A directed graph with timestamped edges and the search index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalGraph {
    num_vertices: usize,
    /// Sorted by `(t, input rank)`; `edges[i].id == i`.
    edges: Vec<TemporalEdge>,
    /// CSR offsets into `out_edges`, length `num_vertices + 1`.
    out_start: Vec<u32>,
    /// Edge ids grouped by source, ascending within each group.
    out_edges: Vec<EdgeId>,
    /// Timestamps parallel to `out_edges` (avoids a pointer chase in search).
    out_times: Vec<Time>,
    labels: Option<Vec<String>>,
    scale: u32,
}

impl TemporalGraph {
    /// Builds the indexed graph from `(src, dst, t)` triples in input order.
    /// The number of vertices is inferred from the largest endpoint.
    pub fn from_triples(triples: &[(VertexId, VertexId, Time)]) -> Self {
        let n = triples
            .iter()
            .map(|&(s, d, _)| s.max(d) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::with_vertices(n, triples)
    }

    /// As [`from_triples`](Self::from_triples) with an explicit vertex count
    /// (which must cover every endpoint; extra vertices are isolated).
    pub fn with_vertices(num_vertices: usize, triples: &[(VertexId, VertexId, Time)]) -> Self {
        let mut order: Vec<u32> = (0..triples.len() as u32).collect();
        // Stable by timestamp: ties keep input order, so the dense ids extend
        // the temporal order to a total order.
        order.sort_by_key(|&i| triples[i as usize].2);
        let edges: Vec<TemporalEdge> = order
            .iter()
            .enumerate()
            .map(|(new_id, &i)| {
                let (src, dst, t) = triples[i as usize];
                assert!(
                    (src as usize) < num_vertices && (dst as usize) < num_vertices,
                    "edge endpoint out of range"
                );
                TemporalEdge {
                    id: new_id as EdgeId,
                    src,
                    dst,
                    t,
                }
            })
            .collect();
        Self::from_sorted_edges(num_vertices, edges, 0, None)
    }

    /// Builds the index from edges already in id order (`edges[i].id == i`,
    /// timestamps non-decreasing).  This is the fast path for cache loads
    /// that skips re-sorting.
    pub fn from_sorted_edges(
        num_vertices: usize,
        edges: Vec<TemporalEdge>,
        scale: u32,
        labels: Option<Vec<String>>,
    ) -> Self {
        debug_assert!(edges
            .iter()
            .enumerate()
            .all(|(i, e)| e.id as usize == i && (i == 0 || edges[i - 1].t <= e.t)));
        let mut degree = alloc::vec![0u32; num_vertices + 1];
        for e in &edges {
            degree[e.src as usize + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let out_start = degree;
        let mut cursor = out_start.clone();
        let mut out_edges = alloc::vec![0 as EdgeId; edges.len()];
        let mut out_times = alloc::vec![0 as Time; edges.len()];
        // Filling in ascending id order keeps each source's slice ascending
        // in id, hence also non-decreasing in time.
        for e in &edges {
            let slot = cursor[e.src as usize] as usize;
            out_edges[slot] = e.id;
            out_times[slot] = e.t;
            cursor[e.src as usize] += 1;
        }
        TemporalGraph {
            num_vertices,
            edges,
            out_start,
            out_edges,
            out_times,
            labels,
            scale,
        }
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edge lookup by dense id.
    pub fn edge(&self, id: EdgeId) -> &TemporalEdge {
        &self.edges[id as usize]
    }

    /// All edges in id (time) order.
    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    /// Out-edge ids of `u`, ascending.
    pub fn out_edges(&self, u: VertexId) -> &[EdgeId] {
        let (s, e) = (
            self.out_start[u as usize] as usize,
            self.out_start[u as usize + 1] as usize,
        );
        &self.out_edges[s..e]
    }

    /// Out-edges of `u` with timestamp in `(t_min, t_max]`, as a contiguous
    /// slice of edge ids — the basic temporal-neighborhood query.
    pub fn neighbors_after(&self, u: VertexId, t_min: Time, t_max: Time) -> &[EdgeId] {
        let (s, e) = (
            self.out_start[u as usize] as usize,
            self.out_start[u as usize + 1] as usize,
        );
        let times = &self.out_times[s..e];
        let lo = times.partition_point(|&t| t <= t_min);
        let hi = times.partition_point(|&t| t <= t_max);
        &self.out_edges[s + lo..s + hi]
    }

    /// Candidate range over *all* edges with id greater than `min_id_excl`
    /// (or every edge when `None`) and timestamp at most `t_max` (unbounded
    /// when `None`).  Global positions coincide with edge ids.
    pub fn global_range(&self, min_id_excl: Option<EdgeId>, t_max: Option<Time>) -> CandRange {
        let lo = match min_id_excl {
            Some(id) => id + 1,
            None => 0,
        };
        let hi = match t_max {
            Some(t) => self.edges.partition_point(|e| e.t <= t) as u32,
            None => self.edges.len() as u32,
        };
        CandRange {
            space: CandSpace::Global,
            lo: lo.min(hi),
            hi,
        }
    }

    /// Candidate range over out-edges of `u` under the same id / time bounds,
    /// as absolute positions into the out-edge array.
    pub fn out_range(
        &self,
        u: VertexId,
        min_id_excl: Option<EdgeId>,
        t_max: Option<Time>,
    ) -> CandRange {
        let s = self.out_start[u as usize] as usize;
        let e = self.out_start[u as usize + 1] as usize;
        let lo = match min_id_excl {
            Some(id) => s + self.out_edges[s..e].partition_point(|&x| x <= id),
            None => s,
        };
        let hi = match t_max {
            Some(t) => s + self.out_times[s..e].partition_point(|&x| x <= t),
            None => e,
        };
        CandRange {
            space: CandSpace::Out,
            lo: lo.min(hi) as u32,
            hi: hi as u32,
        }
    }

    /// Resolves a candidate position to its edge id.
    pub fn candidate_edge(&self, space: CandSpace, pos: u32) -> EdgeId {
        match space {
            CandSpace::Global => pos,
            CandSpace::Out => self.out_edges[pos as usize],
        }
    }

    /// Difference between the latest and earliest timestamp (0 when fewer
    /// than two edges).
    pub fn time_span(&self) -> Time {
        match (self.edges.first(), self.edges.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0,
        }
    }

    /// Fractional timestamp digits this graph was loaded with.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Vertex labels when the source file used names instead of numeric ids.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name for a vertex: its label if present, else its id.
    pub fn vertex_name(&self, v: VertexId) -> String {
        match &self.labels {
            Some(l) => l[v as usize].clone(),
            None => v.to_string(),
        }
    }
}

/// A two-coloring of the vertices witnessing bipartiteness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitePartition {
    /// `side[v]` is 0 or 1; every edge crosses sides.  Disconnected
    /// components are colored independently (isolated vertices get side 0).
    pub side: Vec<u8>,
}

/// Two-colors the undirected projection of the graph by BFS, returning the
/// partition if one exists.  A self-loop is an odd cycle, so any graph
/// containing one is not bipartite.
pub fn detect_bipartite(g: &TemporalGraph) -> Option<BipartitePartition> {
    let n = g.num_vertices();
    let mut adj: Vec<Vec<VertexId>> = alloc::vec![Vec::new(); n];
    for e in g.edges() {
        if e.src == e.dst {
            return None;
        }
        adj[e.src as usize].push(e.dst);
        adj[e.dst as usize].push(e.src);
    }
    let mut side = alloc::vec![u8::MAX; n];
    let mut queue: Vec<VertexId> = Vec::new();
    for start in 0..n {
        if side[start] != u8::MAX {
            continue;
        }
        side[start] = 0;
        queue.clear();
        queue.push(start as VertexId);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let want = side[u as usize] ^ 1;
            for &v in &adj[u as usize] {
                if side[v as usize] == u8::MAX {
                    side[v as usize] = want;
                    queue.push(v);
                } else if side[v as usize] != want {
                    return None;
                }
            }
        }
    }
    let side = side.iter().map(|&s| if s == u8::MAX { 0 } else { s }).collect();
    Some(BipartitePartition { side })
}
