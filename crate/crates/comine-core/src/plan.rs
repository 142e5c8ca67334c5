//! Per-depth specialized traversal plans.
//!
//! Recursive co-mining decides at every rank, dynamically, whether each
//! endpoint of the current pattern edge is already mapped.  But that
//! property is *static*: it depends only on the tree position, not on the
//! data.  [`specialize_plan`] precomputes it into one step record per rank
//! of every node, and [`execute_plan`] dispatches monomorphically on the
//! four (source, destination) mapped-ness combinations — the in-process
//! analog of unrolling the search into per-level specialized loops.  It also
//! drops the per-vertex incidence counters: with static mapped-ness, each
//! vertex is introduced at exactly one rank of the path, so roll-back is a
//! pair of static writes.
//!
//! Execution order is identical to recursive co-mining, so results and even
//! visit counts match exactly.

use alloc::vec::Vec;

use crate::graph::{EdgeId, TemporalGraph, Time, VertexId};
use crate::mgtree::MgTree;
use crate::miner::{CollectSink, MatchResult, MatchSink, MiningStats, NullSink};
use crate::motif::{Mode, MotifEdge};

/// One specialized rank of a plan node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStep {
    /// Global search depth of this step (0-based rank).
    pub rank: u32,
    /// The pattern edge matched at this rank.
    pub edge: MotifEdge,
    /// Statically known: the pattern edge's source is mapped by the prefix.
    pub src_mapped: bool,
    /// Statically known: the pattern edge's destination is mapped.
    pub dst_mapped: bool,
}

/// Plan counterpart of a tree node: the steps for its incremental ranks
/// plus the branch table to its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanNode {
    /// Node id, aligned with the source tree's gids.
    pub gid: u32,
    /// Depth at which this node's first step runs (parent common length).
    pub start_rank: u32,
    /// Specialized steps for ranks `start_rank..start_rank + steps.len()`.
    pub steps: Vec<PlanStep>,
    /// Query motif index to count when the node completes.
    pub emit: Option<usize>,
    /// Child plan nodes, in tree order.
    pub children: Vec<u32>,
}

/// A fully specialized traversal plan for one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalPlan {
    nodes: Vec<PlanNode>,
    num_motifs: usize,
    depth: usize,
    max_vertices: u32,
}

impl TraversalPlan {
    /// Plan nodes indexed by gid.
    pub fn nodes(&self) -> &[PlanNode] {
        &self.nodes
    }

    /// Node lookup by gid.
    pub fn node(&self, gid: u32) -> &PlanNode {
        &self.nodes[gid as usize]
    }

    /// Search depth (deepest node's common-motif length).
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of query motifs the plan emits counts for.
    pub fn num_motifs(&self) -> usize {
        self.num_motifs
    }
}

/// Compiles a tree into its specialized plan.
pub fn specialize_plan(tree: &MgTree) -> TraversalPlan {
    debug_assert!(tree.validate().is_empty());
    let mut parent_len = alloc::vec![0usize; tree.node_count()];
    for node in tree.nodes() {
        for &c in &node.children {
            parent_len[c as usize] = node.common.len();
        }
    }
    let nodes = tree
        .nodes()
        .iter()
        .map(|node| {
            let start = parent_len[node.gid as usize];
            // Vertices mapped by the shared prefix grow edge by edge; a
            // vertex is "mapped" at rank r iff it appears in common[..r].
            let mut mapped = alloc::vec![false; tree.max_vertices() as usize];
            for e in &node.common[..start] {
                mapped[e.src as usize] = true;
                mapped[e.dst as usize] = true;
            }
            let steps = node.common[start..]
                .iter()
                .enumerate()
                .map(|(i, &edge)| {
                    let step = PlanStep {
                        rank: (start + i) as u32,
                        edge,
                        src_mapped: mapped[edge.src as usize],
                        dst_mapped: mapped[edge.dst as usize],
                    };
                    mapped[edge.src as usize] = true;
                    mapped[edge.dst as usize] = true;
                    step
                })
                .collect();
            PlanNode {
                gid: node.gid,
                start_rank: start as u32,
                steps,
                emit: node.query_ref,
                children: node.children.clone(),
            }
        })
        .collect();
    TraversalPlan {
        nodes,
        num_motifs: tree.motifs().len(),
        depth: tree.max_depth(),
        max_vertices: tree.max_vertices(),
    }
}

const UNMAPPED: u32 = u32::MAX;

struct PlanState {
    stack: Vec<EdgeId>,
    m2g: Vec<VertexId>,
    g2m: Vec<u32>,
}

/// Runs a plan over a graph; observationally equivalent to co-mining the
/// plan's source tree.
pub fn execute_plan(
    plan: &TraversalPlan,
    g: &TemporalGraph,
    delta: Time,
    mode: Mode,
) -> (MatchResult, MiningStats) {
    assert!(delta >= 0, "delta must be non-negative");
    let mut stats = MiningStats::new(plan.nodes.len(), plan.depth);
    let mut counts = alloc::vec![0u64; plan.num_motifs];
    let mut state = PlanState {
        stack: Vec::new(),
        m2g: alloc::vec![UNMAPPED; plan.max_vertices as usize],
        g2m: alloc::vec![UNMAPPED; g.num_vertices()],
    };
    let matches = match mode {
        Mode::Count => {
            exec_node(plan, g, delta, 0, 0, &mut state, &mut counts, &mut NullSink, &mut stats);
            None
        }
        Mode::Enumerate => {
            let mut sink = CollectSink::new(plan.num_motifs);
            exec_node(plan, g, delta, 0, 0, &mut state, &mut counts, &mut sink, &mut stats);
            Some(sink.matches)
        }
    };
    debug_assert!(state.stack.is_empty() && state.m2g.iter().all(|&v| v == UNMAPPED));
    (MatchResult { counts, matches }, stats)
}

fn exec_node<S: MatchSink + ?Sized>(
    plan: &TraversalPlan,
    g: &TemporalGraph,
    delta: Time,
    gid: u32,
    step_idx: usize,
    state: &mut PlanState,
    counts: &mut [u64],
    sink: &mut S,
    stats: &mut MiningStats,
) {
    let node = &plan.nodes[gid as usize];
    if step_idx == node.steps.len() {
        stats.node_completions[gid as usize] += 1;
        if let Some(q) = node.emit {
            counts[q] += 1;
            stats.matches += 1;
            sink.record(q, &state.stack);
        }
        for &c in &node.children {
            exec_node(plan, g, delta, c, 0, state, counts, sink, stats);
        }
        return;
    }
    let step = node.steps[step_idx];
    let r = match (state.stack.first(), state.stack.last()) {
        (Some(&bottom), Some(&top)) => {
            let bound = g.edge(bottom).t.saturating_add(delta);
            if step.src_mapped {
                g.out_range(state.m2g[step.edge.src as usize], Some(top), Some(bound))
            } else {
                g.global_range(Some(top), Some(bound))
            }
        }
        _ => g.global_range(None, None),
    };
    for pos in r.lo..r.hi {
        let eid = g.candidate_edge(r.space, pos);
        let e = *g.edge(eid);
        stats.visit(gid, step.rank as usize);
        // Monomorphic structural check: the source needs no equality test
        // when mapped (the adjacency range guarantees it); fresh endpoints
        // need a free graph vertex; two fresh endpoints must be distinct.
        let ok = match (step.src_mapped, step.dst_mapped) {
            (true, true) => e.dst == state.m2g[step.edge.dst as usize],
            (true, false) => state.g2m[e.dst as usize] == UNMAPPED,
            (false, true) => {
                state.g2m[e.src as usize] == UNMAPPED
                    && e.dst == state.m2g[step.edge.dst as usize]
            }
            (false, false) => {
                e.src != e.dst
                    && state.g2m[e.src as usize] == UNMAPPED
                    && state.g2m[e.dst as usize] == UNMAPPED
            }
        };
        if !ok {
            continue;
        }
        stats.expansions += 1;
        if !step.src_mapped {
            state.m2g[step.edge.src as usize] = e.src;
            state.g2m[e.src as usize] = step.edge.src;
        }
        if !step.dst_mapped {
            state.m2g[step.edge.dst as usize] = e.dst;
            state.g2m[e.dst as usize] = step.edge.dst;
        }
        state.stack.push(eid);
        exec_node(plan, g, delta, gid, step_idx + 1, state, counts, sink, stats);
        state.stack.pop();
        if !step.dst_mapped {
            state.g2m[e.dst as usize] = UNMAPPED;
            state.m2g[step.edge.dst as usize] = UNMAPPED;
        }
        if !step.src_mapped {
            state.g2m[e.src as usize] = UNMAPPED;
            state.m2g[step.edge.src as usize] = UNMAPPED;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgtree::MgTree;
    use crate::miner::{co_mine, mine_single};
    use crate::motif::Motif;

    fn motif(name: &str, edges: &[(u32, u32)]) -> Motif {
        Motif::new(name, edges.iter().copied()).unwrap()
    }

    fn graph(triples: &[(u32, u32, i64)]) -> TemporalGraph {
        TemporalGraph::from_triples(triples)
    }

    #[test]
    fn one_edge_motif_compiles_to_a_single_scan_step() {
        let tree = MgTree::build(&[motif("m", &[(0, 1)])]).unwrap();
        let plan = specialize_plan(&tree);
        assert_eq!(plan.nodes().len(), 1);
        assert_eq!(plan.depth(), 1);
        let steps = &plan.node(0).steps;
        assert_eq!(steps.len(), 1);
        assert!(!steps[0].src_mapped && !steps[0].dst_mapped);
    }

    #[test]
    fn three_cycle_steps_specialize_as_expected() {
        let tree = MgTree::build(&[motif("tri", &[(0, 1), (1, 2), (2, 0)])]).unwrap();
        let plan = specialize_plan(&tree);
        let steps = &plan.node(0).steps;
        assert_eq!(
            steps
                .iter()
                .map(|s| (s.src_mapped, s.dst_mapped))
                .collect::<Vec<_>>(),
            // scan-all, adjacency of b with fresh c, adjacency of c with
            // the equality check dst == a.
            vec![(false, false), (true, false), (true, true)]
        );
    }

    #[test]
    fn walkthrough_tree_branches_at_depth_two() {
        let tree = MgTree::build(&[
            motif("M3", &[(0, 1), (1, 2), (2, 0)]),
            motif("M4", &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            motif("M5", &[(0, 1), (1, 2), (2, 3), (0, 3)]),
        ])
        .unwrap();
        let plan = specialize_plan(&tree);
        let root = plan.node(0);
        assert_eq!(root.steps.len(), 2);
        assert_eq!(root.children, vec![1, 2]);
        // M3's incremental step starts at rank 2 with both endpoints mapped.
        let m3 = plan.node(1);
        assert_eq!(m3.start_rank, 2);
        assert_eq!(m3.steps.len(), 1);
        assert!(m3.steps[0].src_mapped && m3.steps[0].dst_mapped);
        // I2's step introduces a fresh destination d.
        let i2 = plan.node(2);
        assert_eq!(i2.steps.len(), 1);
        assert!(i2.steps[0].src_mapped && !i2.steps[0].dst_mapped);
    }

    #[test]
    fn execution_is_observationally_equal_to_co_mine() {
        let g = graph(&[
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 3),
            (2, 3, 4),
            (3, 0, 5),
            (0, 3, 5),
            (1, 2, 6),
            (2, 0, 7),
            (3, 1, 8),
        ]);
        let groups: Vec<Vec<Motif>> = vec![
            vec![motif("one", &[(0, 1)])],
            vec![motif("tri", &[(0, 1), (1, 2), (2, 0)])],
            vec![
                motif("M3", &[(0, 1), (1, 2), (2, 0)]),
                motif("M4", &[(0, 1), (1, 2), (2, 3), (3, 0)]),
                motif("M5", &[(0, 1), (1, 2), (2, 3), (0, 3)]),
            ],
            vec![
                motif("short", &[(0, 1), (1, 2)]),
                motif("long", &[(0, 1), (1, 2), (2, 0)]),
            ],
        ];
        for group in &groups {
            let tree = MgTree::build(group).unwrap();
            let plan = specialize_plan(&tree);
            for delta in [0, 1, 3, 100] {
                let (want, want_stats) = co_mine(&g, &tree, delta, Mode::Enumerate);
                let (got, got_stats) = execute_plan(&plan, &g, delta, Mode::Enumerate);
                assert_eq!(got.counts, want.counts);
                assert_eq!(got.matches, want.matches);
                // Same candidate order, so the instrumentation agrees too.
                assert_eq!(got_stats, want_stats);
            }
        }
    }

    #[test]
    fn plan_agrees_with_mine_single_on_reverse_adjacency_motifs() {
        // Rank-2 edge (2,1) has an unmapped source and a mapped
        // destination: the (false, true) dispatch arm.
        let g = graph(&[(0, 1, 1), (1, 2, 2), (3, 2, 3), (3, 1, 4), (0, 2, 5)]);
        let m = motif("rev", &[(0, 1), (1, 2), (3, 2)]);
        let tree = MgTree::build(core::slice::from_ref(&m)).unwrap();
        let plan = specialize_plan(&tree);
        let steps = &plan.node(0).steps;
        assert_eq!((steps[2].src_mapped, steps[2].dst_mapped), (false, true));
        for delta in [1, 3, 10] {
            let (want, _) = mine_single(&g, &m, delta, Mode::Enumerate);
            let (got, _) = execute_plan(&plan, &g, delta, Mode::Enumerate);
            assert_eq!(got.counts, want.counts);
            assert_eq!(got.matches, want.matches);
        }
    }
}
