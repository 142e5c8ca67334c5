//! The motif-group tree: a prefix tree over a group of motifs' edge
//! sequences.
//!
//! Each node `N` carries a *common motif* `C_N` — an edge sequence shared by
//! every motif below `N` — and optionally a *query reference* `Q_N` when one
//! group motif equals `C_N` exactly.  Co-mining walks this tree once,
//! matching each shared prefix a single time and branching into children
//! where the motifs diverge.  The similarity metric quantifies how much of
//! the group's total edge count the tree deduplicates, and the decision
//! heuristic uses it (plus bipartiteness) to choose between co-mining and
//! per-motif mining.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::graph::{detect_bipartite, TemporalGraph, Time};
use crate::motif::{graph_to_tmap, Motif, MotifEdge};

/// Similarity value at or above which co-mining is chosen on non-bipartite
/// graphs.
pub const SIMILARITY_THRESHOLD: f64 = 0.44;

/// One node of the tree.  `gid`s are sequential in creation order and double
/// as indices into [`MgTree::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgNode {
    /// Node id; equals this node's index in the tree's node array.
    pub gid: u32,
    /// Display label: the query name when `query_ref` is set, `ε` for an
    /// empty root, otherwise `I<k>` in creation order.
    pub label: String,
    /// The shared edge-sequence prefix (empty only at a root whose group has
    /// no shared first edge).
    pub common: Vec<MotifEdge>,
    /// Child gids, in the deterministic first-encounter order.
    pub children: Vec<u32>,
    /// Index into the tree's motif list when `common` *is* one of the query
    /// motifs.
    pub query_ref: Option<usize>,
}

/// Errors from tree construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    /// The motif group was empty.
    #[error("cannot build a tree from an empty motif group")]
    EmptyGroup,
    /// A motif was not in canonical form.
    #[error("motif `{0}` is not canonical")]
    NotCanonical(String),
    /// Two motifs have identical edge sequences.
    #[error("motifs `{0}` and `{1}` are structurally identical")]
    DuplicateStructure(String, String),
    /// Two motifs share a name.
    #[error("duplicate motif name `{0}`")]
    DuplicateName(String),
}

/// A structural defect found by [`MgTree::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeViolation {
    /// A child's common motif does not strictly extend its parent's.
    #[error("node {child}: common motif diverges from parent {parent} at edge rank {rank}")]
    PrefixMismatch {
        /// Parent gid.
        parent: u32,
        /// Child gid.
        child: u32,
        /// 1-based rank of the first mismatching edge (parent length + 1
        /// when the child is not longer than the parent).
        rank: u32,
    },
    /// Two children of one node extend it with the same edge.
    #[error("node {parent}: children {first} and {second} share extension edge at rank {rank}")]
    DuplicateExtension {
        /// Parent gid.
        parent: u32,
        /// First child gid.
        first: u32,
        /// Second child gid.
        second: u32,
        /// 1-based rank of the shared extension edge.
        rank: u32,
    },
    /// A node's query reference does not match its common motif.
    #[error("node {gid}: query_ref `{motif}` differs from the node's common motif")]
    QueryMismatch {
        /// Node gid.
        gid: u32,
        /// Referenced motif name.
        motif: String,
    },
    /// A group motif is not referenced by any node.
    #[error("motif `{motif}` is not covered by any query_ref")]
    MissingQuery {
        /// Uncovered motif name.
        motif: String,
    },
    /// A group motif is referenced by more than one node.
    #[error("motif `{motif}` is covered by multiple query_refs")]
    DuplicateQuery {
        /// Multiply-covered motif name.
        motif: String,
    },
    /// A leaf node has no query reference.
    #[error("leaf node {gid} has no query_ref")]
    LeafWithoutQuery {
        /// Leaf gid.
        gid: u32,
    },
    /// The node array does not form a single rooted tree.
    #[error("node {gid}: {msg}")]
    Malformed {
        /// Offending gid.
        gid: u32,
        /// Description.
        msg: String,
    },
}

/// The motif-group tree.  Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgTree {
    nodes: Vec<MgNode>,
    motifs: Vec<Motif>,
}

impl MgTree {
    /// Builds the tree for a group of canonical, pairwise-distinct motifs.
    ///
    /// Recursion by rank: while every member motif agrees on the next edge
    /// and none has ended, the current node's common motif is extended in
    /// place; otherwise a member that ended becomes this node's query
    /// reference, singleton subgroups become leaf children, and larger
    /// subgroups become intermediate children recursed one rank deeper.
    /// Children are ordered by first encounter scanning the group in input
    /// order, and gids are assigned in creation (depth-first) order.
    pub fn build(group: &[Motif]) -> Result<MgTree, BuildError> {
        if group.is_empty() {
            return Err(BuildError::EmptyGroup);
        }
        for m in group {
            if !m.is_canonical() {
                return Err(BuildError::NotCanonical(m.name().to_string()));
            }
        }
        for i in 0..group.len() {
            for j in (i + 1)..group.len() {
                if group[i].name() == group[j].name() {
                    return Err(BuildError::DuplicateName(group[i].name().to_string()));
                }
                if group[i].same_structure(&group[j]) {
                    return Err(BuildError::DuplicateStructure(
                        group[i].name().to_string(),
                        group[j].name().to_string(),
                    ));
                }
            }
        }

        let tmaps: Vec<_> = group.iter().map(graph_to_tmap).collect();
        let mut tree = MgTree {
            nodes: alloc::vec![MgNode {
                gid: 0,
                label: String::new(),
                common: Vec::new(),
                children: Vec::new(),
                query_ref: None,
            }],
            motifs: group.to_vec(),
        };
        let members: Vec<usize> = (0..group.len()).collect();
        tree.attach(0, members, 0, &tmaps);
        tree.assign_labels();
        Ok(tree)
    }

    /// Grows the subtree of `node` for `members`, whose motifs all share the
    /// node's common motif of length `depth`.
    fn attach(&mut self, node: u32, members: Vec<usize>, depth: u32, tmaps: &[crate::motif::TMap]) {
        let mut members = members;
        let mut depth = depth;
        loop {
            debug_assert_eq!(self.nodes[node as usize].common.len(), depth as usize);
            // A member whose edges are exhausted at this depth *is* the
            // node's common motif: it becomes the node's query reference.
            let finished = members
                .iter()
                .position(|&i| tmaps[i].len() == depth as usize);
            if let Some(pos) = finished {
                let q = members.remove(pos);
                self.nodes[node as usize].query_ref = Some(q);
            }
            // Group the remaining members by their edge at the next rank,
            // keeping first-encounter order.
            let mut groups: Vec<(MotifEdge, Vec<usize>)> = Vec::new();
            for &i in &members {
                let edge = tmaps[i].get(depth + 1).expect("member outlives its motif");
                match groups.iter_mut().find(|(e, _)| *e == edge) {
                    Some((_, g)) => g.push(i),
                    None => groups.push((edge, alloc::vec![i])),
                }
            }
            // Undivided and unfinished: extend this node in place instead of
            // creating a child (the "reuse gid" case).
            if finished.is_none() && groups.len() == 1 {
                let (edge, g) = groups.pop().unwrap();
                self.nodes[node as usize].common.push(edge);
                members = g;
                depth += 1;
                continue;
            }
            for (edge, g) in groups {
                let gid = self.nodes.len() as u32;
                if let [only] = g[..] {
                    // Singleton subgroup: the whole motif becomes a leaf.
                    self.nodes.push(MgNode {
                        gid,
                        label: String::new(),
                        common: self.motifs[only].edges().to_vec(),
                        children: Vec::new(),
                        query_ref: Some(only),
                    });
                    self.nodes[node as usize].children.push(gid);
                } else {
                    let mut common = self.nodes[node as usize].common.clone();
                    common.push(edge);
                    self.nodes.push(MgNode {
                        gid,
                        label: String::new(),
                        common,
                        children: Vec::new(),
                        query_ref: None,
                    });
                    self.nodes[node as usize].children.push(gid);
                    self.attach(gid, g, depth + 1, tmaps);
                }
            }
            return;
        }
    }

    fn assign_labels(&mut self) {
        let mut next_intermediate = 1u32;
        for i in 0..self.nodes.len() {
            self.nodes[i].label = match self.nodes[i].query_ref {
                Some(q) => self.motifs[q].name().to_string(),
                None if self.nodes[i].common.is_empty() => "ε".to_string(),
                None => {
                    let l = alloc::format!("I{next_intermediate}");
                    next_intermediate += 1;
                    l
                }
            };
        }
    }

    /// Assembles a tree from explicit nodes (labels are reassigned), running
    /// full validation.  This is how non-canonical or deliberately defective
    /// trees are built in tests; [`build`](Self::build) is the normal path.
    pub fn from_parts(nodes: Vec<MgNode>, motifs: Vec<Motif>) -> Result<MgTree, Vec<TreeViolation>> {
        let mut tree = MgTree { nodes, motifs };
        tree.assign_labels();
        let violations = tree.validate();
        if violations.is_empty() {
            Ok(tree)
        } else {
            Err(violations)
        }
    }

    /// All nodes, indexed by gid.
    pub fn nodes(&self) -> &[MgNode] {
        &self.nodes
    }

    /// Node lookup by gid.
    pub fn node(&self, gid: u32) -> &MgNode {
        &self.nodes[gid as usize]
    }

    /// The root node (gid 0).
    pub fn root(&self) -> &MgNode {
        &self.nodes[0]
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// The query motifs, in input order; `query_ref`s index into this.
    pub fn motifs(&self) -> &[Motif] {
        &self.motifs
    }

    /// Length of the deepest node's common motif (the search depth).
    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.common.len()).max().unwrap_or(0)
    }

    /// Upper bound (exclusive) on motif-vertex ids used anywhere in the tree.
    pub fn max_vertices(&self) -> u32 {
        let from_nodes = self
            .nodes
            .iter()
            .flat_map(|n| n.common.iter())
            .map(|e| e.src.max(e.dst) + 1)
            .max()
            .unwrap_or(0);
        let from_motifs = self.motifs.iter().map(|m| m.num_vertices()).max().unwrap_or(0);
        from_nodes.max(from_motifs)
    }

    /// Checks every structural invariant against the tree's own motif list;
    /// an empty result means the tree is valid.
    pub fn validate(&self) -> Vec<TreeViolation> {
        self.validate_against(&self.motifs)
    }

    /// As [`validate`](Self::validate) for an explicit motif group: the tree
    /// must form a single rooted hierarchy of strictly-extending common
    /// motifs with pairwise-distinct child extensions, and reference every
    /// group motif from exactly one node whose common motif equals it.
    pub fn validate_against(&self, group: &[Motif]) -> Vec<TreeViolation> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push(TreeViolation::Malformed {
                gid: 0,
                msg: "tree has no nodes".to_string(),
            });
            return out;
        }
        let n = self.nodes.len();
        let mut parents = alloc::vec![0u32; n];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.gid as usize != i {
                out.push(TreeViolation::Malformed {
                    gid: node.gid,
                    msg: alloc::format!("gid does not match position {i}"),
                });
            }
            for &c in &node.children {
                if c as usize >= n || c == 0 {
                    out.push(TreeViolation::Malformed {
                        gid: node.gid,
                        msg: alloc::format!("child {c} out of range"),
                    });
                } else {
                    parents[c as usize] += 1;
                }
            }
        }
        for (i, &p) in parents.iter().enumerate().skip(1) {
            if p != 1 {
                out.push(TreeViolation::Malformed {
                    gid: i as u32,
                    msg: alloc::format!("node has {p} parents"),
                });
            }
        }
        if !out.is_empty() {
            // Shape is broken; the remaining checks assume a tree.
            return out;
        }

        for node in &self.nodes {
            let plen = node.common.len();
            for &c in &node.children {
                let child = &self.nodes[c as usize];
                if child.common.len() <= plen {
                    out.push(TreeViolation::PrefixMismatch {
                        parent: node.gid,
                        child: c,
                        rank: plen as u32 + 1,
                    });
                    continue;
                }
                if let Some(pos) = (0..plen).find(|&k| child.common[k] != node.common[k]) {
                    out.push(TreeViolation::PrefixMismatch {
                        parent: node.gid,
                        child: c,
                        rank: pos as u32 + 1,
                    });
                }
            }
            for (a, &ca) in node.children.iter().enumerate() {
                for &cb in node.children.iter().skip(a + 1) {
                    let (ea, eb) = (
                        self.nodes[ca as usize].common.get(plen),
                        self.nodes[cb as usize].common.get(plen),
                    );
                    if let (Some(ea), Some(eb)) = (ea, eb) {
                        if ea == eb {
                            out.push(TreeViolation::DuplicateExtension {
                                parent: node.gid,
                                first: ca,
                                second: cb,
                                rank: plen as u32 + 1,
                            });
                        }
                    }
                }
            }
            if node.children.is_empty() && node.query_ref.is_none() {
                out.push(TreeViolation::LeafWithoutQuery { gid: node.gid });
            }
        }

        let mut covered = alloc::vec![0usize; group.len()];
        for node in &self.nodes {
            if let Some(q) = node.query_ref {
                if q >= group.len() {
                    out.push(TreeViolation::Malformed {
                        gid: node.gid,
                        msg: alloc::format!("query_ref {q} out of range"),
                    });
                    continue;
                }
                covered[q] += 1;
                if node.common != group[q].edges() {
                    out.push(TreeViolation::QueryMismatch {
                        gid: node.gid,
                        motif: group[q].name().to_string(),
                    });
                }
            }
        }
        for (q, &c) in covered.iter().enumerate() {
            if c == 0 {
                out.push(TreeViolation::MissingQuery {
                    motif: group[q].name().to_string(),
                });
            } else if c > 1 {
                out.push(TreeViolation::DuplicateQuery {
                    motif: group[q].name().to_string(),
                });
            }
        }
        out
    }

    /// The similarity metric: 1 minus the ratio of incremental edges across
    /// tree nodes to total edges across query motifs.  0 means no sharing;
    /// values approach 1 as motifs share longer prefixes.
    pub fn similarity_metric(&self) -> f64 {
        let total: usize = self.motifs.iter().map(|m| m.edge_count()).sum();
        if total == 0 {
            return 0.0;
        }
        let mut incremental = 0usize;
        let mut parent_len = alloc::vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            for &c in &node.children {
                parent_len[c as usize] = node.common.len();
            }
        }
        for node in &self.nodes {
            incremental += node.common.len() - parent_len[node.gid as usize].min(node.common.len());
        }
        1.0 - incremental as f64 / total as f64
    }

    /// Indented outline of the tree, one node per line.
    pub fn outline(&self) -> String {
        fn walk(tree: &MgTree, gid: u32, depth: usize, out: &mut String) {
            let node = tree.node(gid);
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&alloc::format!(
                "{} (gid {}) common=[{}]",
                node.label,
                node.gid,
                edges_str(&node.common)
            ));
            if let Some(q) = node.query_ref {
                out.push_str(&alloc::format!(" query={}", tree.motifs[q].name()));
            }
            out.push('\n');
            for &c in &node.children {
                walk(tree, c, depth + 1, out);
            }
        }
        let mut out = String::new();
        walk(self, 0, 0, &mut out);
        out
    }

    /// GraphViz DOT rendering, deterministic node and edge order.
    pub fn dot(&self) -> String {
        let mut out = String::from("digraph mgtree {\n  node [shape=box];\n");
        for node in &self.nodes {
            let mut label = alloc::format!("{}\\ngid {}\\ncommon: {}", node.label, node.gid, edges_str(&node.common));
            if let Some(q) = node.query_ref {
                label.push_str(&alloc::format!("\\nquery: {}", self.motifs[q].name()));
            }
            out.push_str(&alloc::format!("  n{} [label=\"{}\"];\n", node.gid, label));
        }
        for node in &self.nodes {
            for &c in &node.children {
                out.push_str(&alloc::format!("  n{} -> n{};\n", node.gid, c));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn edges_str(edges: &[MotifEdge]) -> String {
    let mut out = String::new();
    for (i, e) in edges.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&alloc::format!("{}->{}", e.src, e.dst));
    }
    out
}

/// The choice between one shared traversal and per-motif runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiningDecision {
    /// Mine the whole group in one tree traversal.
    CoMine,
    /// Mine each motif separately.
    MineIndividually,
}

/// The heuristic's verdict with the evidence behind it.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecisionRecord {
    /// The chosen strategy.
    pub decision: MiningDecision,
    /// Similarity metric of the tree.
    pub similarity: f64,
    /// Threshold the similarity was compared against.
    pub threshold: f64,
    /// Whether the graph is bipartite.
    pub bipartite: bool,
    /// Window length relative to the dataset's time span (advisory only:
    /// shorter windows tend to amplify co-mining's benefit).
    pub delta_over_span: f64,
    /// Human-readable justification, one clause per line.
    pub reasons: Vec<String>,
}

/// Decides between co-mining and individual mining: co-mine on bipartite
/// graphs unconditionally, otherwise exactly when the similarity metric
/// reaches [`SIMILARITY_THRESHOLD`].  The window/span ratio is reported but
/// never changes the decision.
pub fn co_mining_heuristic(g: &TemporalGraph, tree: &MgTree, delta: Time) -> DecisionRecord {
    let similarity = tree.similarity_metric();
    let bipartite = detect_bipartite(g).is_some();
    let span = g.time_span();
    let delta_over_span = if span > 0 {
        delta as f64 / span as f64
    } else {
        0.0
    };
    let mut reasons = Vec::new();
    let decision = if bipartite {
        reasons.push("graph is bipartite: shared prefixes prune identically for all motifs, so co-mining is never harmful".to_string());
        MiningDecision::CoMine
    } else if similarity >= SIMILARITY_THRESHOLD {
        reasons.push(alloc::format!(
            "similarity {similarity:.4} >= threshold {SIMILARITY_THRESHOLD}"
        ));
        MiningDecision::CoMine
    } else {
        reasons.push(alloc::format!(
            "similarity {similarity:.4} < threshold {SIMILARITY_THRESHOLD}"
        ));
        MiningDecision::MineIndividually
    };
    if span > 0 {
        reasons.push(alloc::format!(
            "window covers {:.2}% of the time span (advisory: shorter windows favor co-mining)",
            delta_over_span * 100.0
        ));
    }
    DecisionRecord {
        decision,
        similarity,
        threshold: SIMILARITY_THRESHOLD,
        bipartite,
        delta_over_span,
        reasons,
    }
}
