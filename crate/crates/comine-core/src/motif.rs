//! Temporal motifs and multi-motif query documents.
//!
//! A motif is a *sequence* of directed pattern edges over a small vertex set;
//! the sequence position is the edge's temporal rank.  Canonicalization
//! renumbers motif vertices by first appearance so that structurally
//! identical sequences written with different vertex names compare equal.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::graph::TimeLiteral;

/// One directed pattern edge between motif vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MotifEdge {
    /// Source motif vertex.
    pub src: u32,
    /// Destination motif vertex.
    pub dst: u32,
}

/// Why a motif definition was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotifError {
    /// Motif edges must connect two distinct vertices.
    #[error("motif `{name}`: edge {index} is a self-loop")]
    SelfLoop {
        /// Motif name.
        name: String,
        /// 0-based index of the offending edge.
        index: usize,
    },
    /// A motif needs at least one edge.
    #[error("motif `{name}` has no edges")]
    NoEdges {
        /// Motif name.
        name: String,
    },
}

/// A named temporal motif: directed edges in temporal-rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    name: String,
    num_vertices: u32,
    edges: Vec<MotifEdge>,
}

impl Motif {
    /// Builds a motif from `(src, dst)` pairs in rank order.  Rejects
    /// self-loops and empty edge lists; vertex ids need not be dense (use
    /// [`canonicalize`](Self::canonicalize) for that).
    pub fn new(
        name: impl Into<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, MotifError> {
        let name = name.into();
        let edges: Vec<MotifEdge> = edges
            .into_iter()
            .map(|(src, dst)| MotifEdge { src, dst })
            .collect();
        if edges.is_empty() {
            return Err(MotifError::NoEdges { name });
        }
        if let Some(index) = edges.iter().position(|e| e.src == e.dst) {
            return Err(MotifError::SelfLoop { name, index });
        }
        let num_vertices = edges
            .iter()
            .map(|e| e.src.max(e.dst) + 1)
            .max()
            .unwrap_or(0);
        Ok(Motif {
            name,
            num_vertices,
            edges,
        })
    }

    /// Motif name (identifies the motif in query output).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Pattern edges in temporal-rank order.
    pub fn edges(&self) -> &[MotifEdge] {
        &self.edges
    }

    /// Number of pattern edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// One past the largest vertex id used.
    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    /// Renumbers vertices in order of first appearance (source before
    /// destination, edges in rank order), producing dense ids `0..k`.
    pub fn canonicalize(&self) -> Motif {
        let mut map = alloc::vec![u32::MAX; self.num_vertices as usize];
        let mut next = 0u32;
        let mut assign = |v: u32, map: &mut Vec<u32>| -> u32 {
            if map[v as usize] == u32::MAX {
                map[v as usize] = next;
                next += 1;
            }
            map[v as usize]
        };
        let edges: Vec<MotifEdge> = self
            .edges
            .iter()
            .map(|e| MotifEdge {
                src: assign(e.src, &mut map),
                dst: assign(e.dst, &mut map),
            })
            .collect();
        Motif {
            name: self.name.clone(),
            num_vertices: next,
            edges,
        }
    }

    /// True when the motif already uses first-appearance numbering.
    pub fn is_canonical(&self) -> bool {
        self.canonicalize().edges == self.edges && {
            // Dense ids: every vertex below num_vertices appears.
            let mut seen = alloc::vec![false; self.num_vertices as usize];
            for e in &self.edges {
                seen[e.src as usize] = true;
                seen[e.dst as usize] = true;
            }
            seen.iter().all(|&s| s)
        }
    }

    /// True when the two motifs have the same canonical edge sequence
    /// (names are ignored).
    pub fn same_structure(&self, other: &Motif) -> bool {
        self.canonicalize().edges == other.canonicalize().edges
    }

    /// Copy of the motif under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Motif {
        Motif {
            name: name.into(),
            num_vertices: self.num_vertices,
            edges: self.edges.clone(),
        }
    }
}

/// Rank-indexed edge map of a motif: the pattern edge to match at each
/// 1-based temporal rank.  This is the form tree construction and the miners
/// consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMap {
    edges: Vec<MotifEdge>,
}

impl TMap {
    /// Pattern edge at 1-based `rank`, or `None` past the motif's length.
    pub fn get(&self, rank: u32) -> Option<MotifEdge> {
        if rank == 0 {
            return None;
        }
        self.edges.get(rank as usize - 1).copied()
    }

    /// Number of ranks (motif edges).
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// True for a motif with no edges (cannot occur for validated motifs).
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Converts a motif's ordered edge multigraph into its rank-indexed map.
pub fn graph_to_tmap(m: &Motif) -> TMap {
    TMap {
        edges: m.edges.clone(),
    }
}

/// Whether matches are only counted or fully materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Count matches per motif.
    Count,
    /// Record every match's graph-edge id sequence.
    Enumerate,
}

/// Load-balancing strategy for the parallel runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// Static contiguous chunks of the root candidate range, one per worker.
    None,
    /// Workers pull fixed-size chunks from a shared queue.
    Dynamic,
    /// Dynamic pulling plus context splitting: running searches are suspended,
    /// split into independent contexts, and redistributed when workers idle.
    ContextSplit,
}

impl core::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(Mode::Count),
            "enumerate" => Ok(Mode::Enumerate),
            other => Err(alloc::format!(
                "unknown mode `{other}` (expected count|enumerate)"
            )),
        }
    }
}

impl core::str::FromStr for Balance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Balance::None),
            "dynamic" => Ok(Balance::Dynamic),
            "context_split" => Ok(Balance::ContextSplit),
            other => Err(alloc::format!(
                "unknown balance `{other}` (expected none|dynamic|context_split)"
            )),
        }
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Count => "count",
            Mode::Enumerate => "enumerate",
        })
    }
}

impl core::fmt::Display for Balance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Balance::None => "none",
            Balance::Dynamic => "dynamic",
            Balance::ContextSplit => "context_split",
        })
    }
}

/// A parsed multi-motif query document.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    /// Path of the graph file, as written in the document.
    pub graph: String,
    /// Window length, exact decimal; resolved against the graph's scale at
    /// load time.
    pub delta: TimeLiteral,
    /// Count or enumerate (default count).
    pub mode: Mode,
    /// Requested worker count; `None` means "use the hardware thread count",
    /// which the embedding runtime resolves (this crate cannot query it).
    pub threads: Option<usize>,
    /// Load-balancing strategy (default dynamic).
    pub balance: Balance,
    /// Canonicalized motifs in document order.
    pub motifs: Vec<Motif>,
}

/// Errors from [`parse_query`], naming 1-based source lines where possible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    /// Malformed or unknown directive.
    #[error("line {line}: {msg}")]
    Syntax {
        /// 1-based line number.
        line: usize,
        /// Description of the problem.
        msg: String,
    },
    /// No `graph` directive present.
    #[error("query has no `graph` directive")]
    MissingGraph,
    /// No `delta` directive present.
    #[error("query has no `delta` directive")]
    MissingDelta,
    /// No motif blocks present.
    #[error("query defines no motifs")]
    NoMotifs,
    /// `delta` must be strictly positive.
    #[error("line {line}: delta must be positive")]
    NonPositiveDelta {
        /// 1-based line number.
        line: usize,
    },
    /// Invalid motif definition.
    #[error("line {line}: {source}")]
    Motif {
        /// 1-based line number of the motif header.
        line: usize,
        /// Underlying motif error.
        source: MotifError,
    },
    /// Two motifs share a name.
    #[error("duplicate motif name `{name}`")]
    DuplicateName {
        /// The repeated name.
        name: String,
    },
    /// Two motifs are structurally identical after canonicalization.
    #[error("motifs `{first}` and `{second}` are structurally identical")]
    DuplicateStructure {
        /// Name of the earlier motif.
        first: String,
        /// Name of the later, redundant motif.
        second: String,
    },
}

/// Parses a query document.
///
/// Line-oriented: `graph <path>`, `delta <number>`, optional `mode`,
/// `threads`, `balance`, then one or more `motif <name> … end` blocks whose
/// bodies are `edge <u> <v>` lines in temporal-rank order.  `#` starts a
/// comment.  Motif-vertex tokens that are all integers are used directly;
/// otherwise tokens are interned per motif in first-appearance order.
/// Motifs are canonicalized, and structural duplicates are an error.
pub fn parse_query(input: &str) -> Result<Query, QueryError> {
    let mut graph: Option<String> = None;
    let mut delta: Option<TimeLiteral> = None;
    let mut delta_line = 0usize;
    let mut mode = Mode::Count;
    let mut threads: Option<usize> = None;
    let mut balance = Balance::Dynamic;
    let mut motifs: Vec<Motif> = Vec::new();

    struct Block {
        name: String,
        header_line: usize,
        edges: Vec<(String, String)>,
    }
    let mut block: Option<Block> = None;

    let syntax = |line: usize, msg: String| QueryError::Syntax { line, msg };

    let close_block = |b: Block, motifs: &mut Vec<Motif>| -> Result<(), QueryError> {
        let numeric = b
            .edges
            .iter()
            .all(|(u, v)| u.parse::<u32>().is_ok() && v.parse::<u32>().is_ok());
        let mut intern: Vec<String> = Vec::new();
        let id_of = |tok: &str, intern: &mut Vec<String>| -> u32 {
            match intern.iter().position(|s| s == tok) {
                Some(i) => i as u32,
                None => {
                    intern.push(tok.to_string());
                    intern.len() as u32 - 1
                }
            }
        };
        let pairs: Vec<(u32, u32)> = b
            .edges
            .iter()
            .map(|(u, v)| {
                if numeric {
                    (u.parse().unwrap(), v.parse().unwrap())
                } else {
                    (id_of(u, &mut intern), id_of(v, &mut intern))
                }
            })
            .collect();
        let motif = Motif::new(b.name, pairs)
            .map_err(|source| QueryError::Motif {
                line: b.header_line,
                source,
            })?
            .canonicalize();
        motifs.push(motif);
        Ok(())
    };

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        match (&mut block, head) {
            (None, "graph") => {
                if graph.is_some() {
                    return Err(syntax(line_no, "duplicate `graph` directive".to_string()));
                }
                if rest.is_empty() {
                    return Err(syntax(line_no, "`graph` needs a path".to_string()));
                }
                graph = Some(rest.join(" "));
            }
            (None, "delta") => {
                if delta.is_some() {
                    return Err(syntax(line_no, "duplicate `delta` directive".to_string()));
                }
                let [tok] = rest[..] else {
                    return Err(syntax(line_no, "`delta` needs one number".to_string()));
                };
                let lit = TimeLiteral::parse(tok)
                    .map_err(|e| syntax(line_no, alloc::format!("bad delta: {e}")))?;
                if !lit.is_positive() {
                    return Err(QueryError::NonPositiveDelta { line: line_no });
                }
                delta = Some(lit);
                delta_line = line_no;
            }
            (None, "mode") => {
                let [tok] = rest[..] else {
                    return Err(syntax(line_no, "`mode` needs one value".to_string()));
                };
                mode = tok.parse().map_err(|e| syntax(line_no, e))?;
            }
            (None, "threads") => {
                let [tok] = rest[..] else {
                    return Err(syntax(line_no, "`threads` needs one value".to_string()));
                };
                match tok.parse::<usize>() {
                    Ok(n) if n >= 1 => threads = Some(n),
                    _ => {
                        return Err(syntax(
                            line_no,
                            "`threads` needs a positive integer".to_string(),
                        ))
                    }
                }
            }
            (None, "balance") => {
                let [tok] = rest[..] else {
                    return Err(syntax(line_no, "`balance` needs one value".to_string()));
                };
                balance = tok.parse().map_err(|e| syntax(line_no, e))?;
            }
            (None, "motif") => {
                let [name] = rest[..] else {
                    return Err(syntax(line_no, "`motif` needs one name".to_string()));
                };
                if motifs.iter().any(|m| m.name() == name) {
                    return Err(QueryError::DuplicateName {
                        name: name.to_string(),
                    });
                }
                block = Some(Block {
                    name: name.to_string(),
                    header_line: line_no,
                    edges: Vec::new(),
                });
            }
            (None, "edge") => {
                return Err(syntax(
                    line_no,
                    "`edge` outside a motif block".to_string(),
                ));
            }
            (None, "end") => {
                return Err(syntax(line_no, "`end` without `motif`".to_string()));
            }
            (Some(b), "edge") => {
                let [u, v] = rest[..] else {
                    return Err(syntax(line_no, "`edge` needs two vertices".to_string()));
                };
                b.edges.push((u.to_string(), v.to_string()));
            }
            (Some(_), "end") => {
                if !rest.is_empty() {
                    return Err(syntax(line_no, "`end` takes no arguments".to_string()));
                }
                close_block(block.take().unwrap(), &mut motifs)?;
            }
            (Some(_), other) => {
                return Err(syntax(
                    line_no,
                    alloc::format!("unexpected `{other}` inside motif block"),
                ));
            }
            (None, other) => {
                return Err(syntax(line_no, alloc::format!("unknown directive `{other}`")));
            }
        }
    }
    if let Some(b) = block {
        return Err(syntax(
            b.header_line,
            alloc::format!("motif `{}` is missing its `end`", b.name),
        ));
    }
    let graph = graph.ok_or(QueryError::MissingGraph)?;
    let delta = delta.ok_or(QueryError::MissingDelta)?;
    let _ = delta_line;
    if motifs.is_empty() {
        return Err(QueryError::NoMotifs);
    }
    for i in 0..motifs.len() {
        for j in (i + 1)..motifs.len() {
            if motifs[i].same_structure(&motifs[j]) {
                return Err(QueryError::DuplicateStructure {
                    first: motifs[i].name().to_string(),
                    second: motifs[j].name().to_string(),
                });
            }
        }
    }
    Ok(Query {
        graph,
        delta,
        mode,
        threads,
        balance,
        motifs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn motif(name: &str, edges: &[(u32, u32)]) -> Motif {
        Motif::new(name, edges.iter().copied()).unwrap()
    }

    #[test]
    fn canonicalize_renumbers_by_first_appearance() {
        let m = motif("m", &[(2, 5), (5, 3)]);
        let c = m.canonicalize();
        let got: Vec<(u32, u32)> = c.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(got, vec![(0, 1), (1, 2)]);
        assert_eq!(c.num_vertices(), 3);
        assert_eq!(c.name(), "m");
        assert!(c.is_canonical());
        assert_eq!(c.canonicalize(), c);
        assert!(!m.is_canonical());
    }

    #[test]
    fn same_structure_ignores_names_and_numbering() {
        let a = motif("a", &[(0, 1), (1, 2), (2, 0)]);
        let b = motif("b", &[(7, 3), (3, 9), (9, 7)]);
        assert!(a.same_structure(&b));
        // Different edge order is a different temporal motif.
        let c = motif("c", &[(0, 1), (2, 0), (1, 2)]);
        assert!(!a.same_structure(&c));
    }

    #[test]
    fn rejects_self_loops_and_empty_motifs() {
        assert_eq!(
            Motif::new("m", [(0u32, 1u32), (1, 1)]),
            Err(MotifError::SelfLoop {
                name: "m".into(),
                index: 1
            })
        );
        assert_eq!(
            Motif::new("m", core::iter::empty::<(u32, u32)>()),
            Err(MotifError::NoEdges { name: "m".into() })
        );
    }

    #[test]
    fn tmap_is_one_based_rank_order() {
        let m = motif("m", &[(0, 1), (1, 2)]);
        let tm = graph_to_tmap(&m);
        assert_eq!(tm.len(), 2);
        assert_eq!(tm.get(0), None);
        assert_eq!(tm.get(1), Some(MotifEdge { src: 0, dst: 1 }));
        assert_eq!(tm.get(2), Some(MotifEdge { src: 1, dst: 2 }));
        assert_eq!(tm.get(3), None);
    }

    #[test]
    fn parses_a_full_query_document() {
        let text = "\
# two motifs over one graph
graph data/wiki.txt
delta 3600
mode enumerate
threads 4
balance dynamic

motif triangle
  edge 0 1
  edge 1 2
  edge 2 0
end

motif fan   # named vertices are fine too
  edge hub a
  edge hub b
end
";
        let q = parse_query(text).unwrap();
        assert_eq!(q.graph, "data/wiki.txt");
        assert_eq!(q.delta.to_scaled(0).unwrap(), 3600);
        assert_eq!(q.mode, Mode::Enumerate);
        assert_eq!(q.threads, Some(4));
        assert_eq!(q.balance, Balance::Dynamic);
        assert_eq!(q.motifs.len(), 2);
        assert_eq!(q.motifs[0].name(), "triangle");
        let fan: Vec<(u32, u32)> = q.motifs[1].edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(fan, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn defaults_are_count_and_dynamic_balance() {
        let q = parse_query("graph g\ndelta 5\nmotif m\nedge 0 1\nend\n").unwrap();
        assert_eq!(q.mode, Mode::Count);
        assert_eq!(q.balance, Balance::Dynamic);
        assert_eq!(q.threads, None);
    }

    #[test]
    fn decimal_delta_is_kept_exact() {
        let q = parse_query("graph g\ndelta 3.5\nmotif m\nedge 0 1\nend\n").unwrap();
        assert_eq!(q.delta.to_scaled(1).unwrap(), 35);
        assert!(q.delta.to_scaled(0).is_err());
    }

    #[test]
    fn rejects_bad_deltas() {
        let e = parse_query("graph g\ndelta 0\nmotif m\nedge 0 1\nend\n").unwrap_err();
        assert_eq!(e, QueryError::NonPositiveDelta { line: 2 });
        let e = parse_query("graph g\ndelta -3\nmotif m\nedge 0 1\nend\n").unwrap_err();
        assert_eq!(e, QueryError::NonPositiveDelta { line: 2 });
        assert!(matches!(
            parse_query("graph g\ndelta x\nmotif m\nedge 0 1\nend\n"),
            Err(QueryError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_structural_duplicates_naming_both() {
        let text = "\
graph g
delta 10
motif first
  edge 0 1
  edge 1 2
end
motif second
  edge 5 6
  edge 6 7
end
";
        assert_eq!(
            parse_query(text).unwrap_err(),
            QueryError::DuplicateStructure {
                first: "first".into(),
                second: "second".into(),
            }
        );
    }

    #[test]
    fn reports_block_and_directive_errors_with_lines() {
        assert!(matches!(
            parse_query("graph g\ndelta 1\nedge 0 1\n"),
            Err(QueryError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_query("graph g\ndelta 1\nmotif m\nedge 0 1\n"),
            Err(QueryError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_query("graph g\ndelta 1\nwat\n"),
            Err(QueryError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_query("graph g\ndelta 1\nmotif m\nedge 1 1\nend\n"),
            Err(QueryError::Motif {
                line: 3,
                source: MotifError::SelfLoop { .. }
            })
        ));
        assert_eq!(
            parse_query("delta 1\nmotif m\nedge 0 1\nend\n").unwrap_err(),
            QueryError::MissingGraph
        );
        assert_eq!(
            parse_query("graph g\nmotif m\nedge 0 1\nend\n").unwrap_err(),
            QueryError::MissingDelta
        );
        assert_eq!(parse_query("graph g\ndelta 1\n").unwrap_err(), QueryError::NoMotifs);
    }
}
