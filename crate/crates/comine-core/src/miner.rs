//! The backtracking matcher: book-keeping context, candidate filtering, the
//! per-motif baseline miner, and the tree-driven co-miner.
//!
//! Both miners walk the same search tree shape: at rank `r` they iterate a
//! contiguous candidate range from the graph index (all edges at rank 0;
//! later ranks restricted to edges after the previous match and within `δ`
//! of the first), filter structurally, *roll on* the accepted edge's vertex
//! mappings, recurse, and roll back.  The co-miner additionally branches
//! into tree children at node boundaries, so shared prefixes are matched
//! once for the whole motif group.

use alloc::vec::Vec;
use thiserror::Error;

use crate::graph::{CandRange, EdgeId, TemporalEdge, TemporalGraph, Time, VertexId};
use crate::mgtree::MgTree;
use crate::motif::{Mode, Motif, MotifEdge};

/// Sentinel for "no mapping" in the vertex maps.
const UNMAPPED: u32 = u32::MAX;

/// Mutable book-keeping for one in-progress match: the stack of matched
/// edges plus the motif↔graph vertex maps and per-vertex incidence counts
/// that make unmapping on backtrack O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchContext {
    e_stack: Vec<EdgeId>,
    /// Motif vertex → graph vertex ([`UNMAPPED`] when absent).
    m2g: Vec<VertexId>,
    /// Graph vertex → motif vertex (sparse; [`UNMAPPED`] when absent).
    g2m: Vec<u32>,
    /// Number of stacked edges incident to each graph vertex; a mapping is
    /// released exactly when this returns to zero.
    incnt: Vec<u32>,
}

impl MatchContext {
    /// Fresh context for a graph with `graph_vertices` vertices and motifs
    /// using ids below `motif_vertices`.
    pub fn new(graph_vertices: usize, motif_vertices: u32) -> Self {
        MatchContext {
            e_stack: Vec::new(),
            m2g: alloc::vec![UNMAPPED; motif_vertices as usize],
            g2m: alloc::vec![UNMAPPED; graph_vertices],
            incnt: alloc::vec![0; graph_vertices],
        }
    }

    /// Records the mapping `(u_m → u_g, v_m → v_g)` for a matched edge and
    /// bumps both endpoints' incidence counts.  Endpoints may already be
    /// mapped, but only to the same vertices (anything else is a bug in the
    /// caller's structural filtering, not a data condition).
    pub fn roll_on_edge(&mut self, u_m: u32, v_m: u32, u_g: VertexId, v_g: VertexId) {
        debug_assert!(self.consistent(u_m, u_g) && self.consistent(v_m, v_g));
        self.m2g[u_m as usize] = u_g;
        self.g2m[u_g as usize] = u_m;
        self.m2g[v_m as usize] = v_g;
        self.g2m[v_g as usize] = v_m;
        self.incnt[u_g as usize] += 1;
        self.incnt[v_g as usize] += 1;
    }

    fn consistent(&self, m: u32, g: VertexId) -> bool {
        (self.m2g[m as usize] == UNMAPPED || self.m2g[m as usize] == g)
            && (self.g2m[g as usize] == UNMAPPED || self.g2m[g as usize] == m)
    }

    /// Exact inverse of the matching [`roll_on_edge`](Self::roll_on_edge):
    /// decrements both incidence counts and releases any endpoint whose
    /// count reaches zero.
    pub fn roll_back_edge(&mut self, u_g: VertexId, v_g: VertexId) {
        for gv in [u_g, v_g] {
            let c = &mut self.incnt[gv as usize];
            assert!(*c > 0, "roll_back_edge underflow at vertex {gv}");
            *c -= 1;
            if *c == 0 {
                let mv = self.g2m[gv as usize];
                assert!(mv != UNMAPPED, "unmapping a vertex that was never mapped");
                self.m2g[mv as usize] = UNMAPPED;
                self.g2m[gv as usize] = UNMAPPED;
            }
        }
    }

    /// Pushes a matched edge id (callers pair this with
    /// [`roll_on_edge`](Self::roll_on_edge)).
    pub fn push_match(&mut self, e: EdgeId) {
        self.e_stack.push(e);
    }

    /// Pops the most recent matched edge id.
    pub fn pop_match(&mut self) -> Option<EdgeId> {
        self.e_stack.pop()
    }

    /// Matched edge ids in temporal rank order.
    pub fn e_stack(&self) -> &[EdgeId] {
        &self.e_stack
    }

    /// Current match depth (number of stacked edges).
    pub fn depth(&self) -> usize {
        self.e_stack.len()
    }

    /// Most recently matched edge.
    pub fn top(&self) -> Option<EdgeId> {
        self.e_stack.last().copied()
    }

    /// First matched edge (the window anchor).
    pub fn bottom(&self) -> Option<EdgeId> {
        self.e_stack.first().copied()
    }

    /// Graph vertex a motif vertex is mapped to, if any.
    pub fn mapped(&self, u_m: u32) -> Option<VertexId> {
        match self.m2g[u_m as usize] {
            UNMAPPED => None,
            g => Some(g),
        }
    }

    /// Motif vertex a graph vertex is mapped to, if any.
    pub fn motif_vertex_of(&self, v_g: VertexId) -> Option<u32> {
        match self.g2m[v_g as usize] {
            UNMAPPED => None,
            m => Some(m),
        }
    }

    /// Matched edges currently incident to a graph vertex.
    pub fn incident_count(&self, v_g: VertexId) -> u32 {
        self.incnt[v_g as usize]
    }

    /// True when the context holds no state at all — the post-condition of
    /// every complete mining run.
    pub fn is_clear(&self) -> bool {
        self.e_stack.is_empty()
            && self.m2g.iter().all(|&v| v == UNMAPPED)
            && self.g2m.iter().all(|&v| v == UNMAPPED)
            && self.incnt.iter().all(|&c| c == 0)
    }
}

/// Why a candidate edge was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Rejection {
    /// Candidate does not come after the previous matched edge in the total
    /// edge order.
    #[error("candidate precedes the previous matched edge")]
    TemporalOrder,
    /// Candidate falls outside the δ window anchored at the first match.
    #[error("candidate exceeds the delta window")]
    Window,
    /// Candidate's endpoints conflict with the current vertex mapping.
    #[error("candidate violates the vertex mapping")]
    Structural,
}

/// Full filter for one candidate: temporal order, window, then structure.
/// The miners fold the first two checks into their candidate ranges; this
/// standalone form is the reference the ranges are tested against.
pub fn check_candidate(
    ctx: &MatchContext,
    g: &TemporalGraph,
    me: MotifEdge,
    e: &TemporalEdge,
    delta: Time,
) -> Result<(), Rejection> {
    if let (Some(top), Some(bottom)) = (ctx.top(), ctx.bottom()) {
        if e.id <= top {
            return Err(Rejection::TemporalOrder);
        }
        if e.t - g.edge(bottom).t > delta {
            return Err(Rejection::Window);
        }
    }
    if structural_ok(ctx, me, e.src, e.dst) {
        Ok(())
    } else {
        Err(Rejection::Structural)
    }
}

/// Structural admissibility of mapping motif edge `me` onto graph edge
/// `(gu, gv)`: each already-mapped endpoint must match exactly, each fresh
/// endpoint must map to a fresh graph vertex, and two fresh endpoints may
/// not collapse onto one graph vertex.  (Motif edges have distinct
/// endpoints, so this is full injectivity.)
pub(crate) fn structural_ok(ctx: &MatchContext, me: MotifEdge, gu: VertexId, gv: VertexId) -> bool {
    let src_mapped = ctx.mapped(me.src);
    let dst_mapped = ctx.mapped(me.dst);
    match src_mapped {
        Some(u) => {
            if u != gu {
                return false;
            }
        }
        None => {
            if ctx.motif_vertex_of(gu).is_some() {
                return false;
            }
        }
    }
    match dst_mapped {
        Some(v) => {
            if v != gv {
                return false;
            }
        }
        None => {
            if ctx.motif_vertex_of(gv).is_some() {
                return false;
            }
        }
    }
    if src_mapped.is_none() && dst_mapped.is_none() && gu == gv {
        return false;
    }
    true
}

/// The contiguous candidate range for the next match given the current
/// context: every edge at rank 0; otherwise edges after the stack top, no
/// later than `t(bottom) + δ`, drawn from the mapped source's out-edges when
/// the motif edge's source is already mapped and from the global order
/// otherwise.
pub fn candidate_range(
    g: &TemporalGraph,
    ctx: &MatchContext,
    me_src: u32,
    delta: Time,
) -> CandRange {
    match (ctx.top(), ctx.bottom()) {
        (Some(top), Some(bottom)) => {
            let bound = g.edge(bottom).t.saturating_add(delta);
            match ctx.mapped(me_src) {
                Some(u) => g.out_range(u, Some(top), Some(bound)),
                None => g.global_range(Some(top), Some(bound)),
            }
        }
        _ => g.global_range(None, None),
    }
}

/// Instrumentation for one mining run (or one worker's share of it).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MiningStats {
    /// Candidate edges examined.
    pub visits: u64,
    /// Candidates accepted and recursed into.
    pub expansions: u64,
    /// Query-motif matches found.
    pub matches: u64,
    /// Visits attributed to each tree node (by gid; single-motif runs use
    /// one slot).
    pub node_visits: Vec<u64>,
    /// Times each node's common motif was completely matched.
    pub node_completions: Vec<u64>,
    /// Visits per search depth (motif-edge rank).
    pub visits_by_depth: Vec<u64>,
}

impl MiningStats {
    /// Zeroed stats for `nodes` tree nodes and search depth `depth`.
    pub fn new(nodes: usize, depth: usize) -> Self {
        MiningStats {
            visits: 0,
            expansions: 0,
            matches: 0,
            node_visits: alloc::vec![0; nodes],
            node_completions: alloc::vec![0; nodes],
            visits_by_depth: alloc::vec![0; depth],
        }
    }

    /// Records one candidate visit attributed to `gid` at search depth
    /// `rank`.
    #[inline]
    pub fn visit(&mut self, gid: u32, rank: usize) {
        self.visits += 1;
        self.node_visits[gid as usize] += 1;
        self.visits_by_depth[rank] += 1;
    }

    /// Accumulates another worker's stats into this one.
    pub fn merge(&mut self, other: &MiningStats) {
        self.visits += other.visits;
        self.expansions += other.expansions;
        self.matches += other.matches;
        for (a, b) in self.node_visits.iter_mut().zip(&other.node_visits) {
            *a += b;
        }
        for (a, b) in self.node_completions.iter_mut().zip(&other.node_completions) {
            *a += b;
        }
        for (a, b) in self.visits_by_depth.iter_mut().zip(&other.visits_by_depth) {
            *a += b;
        }
    }
}

/// Receiver for enumerated matches: called once per match with the graph
/// edge ids in temporal rank order.  Streaming through a sink keeps memory
/// bounded for large enumerations.
pub trait MatchSink {
    /// Records one match of motif `motif` (index into the query group).
    fn record(&mut self, motif: usize, edges: &[EdgeId]);
}

/// Sink that drops everything (count mode).
pub struct NullSink;

impl MatchSink for NullSink {
    fn record(&mut self, _motif: usize, _edges: &[EdgeId]) {}
}

/// Sink that collects matches per motif in memory.
pub struct CollectSink {
    /// `matches[m]` is the list of matches of motif `m`, in search order.
    pub matches: Vec<Vec<Vec<EdgeId>>>,
}

impl CollectSink {
    /// Empty sink for `num_motifs` motifs.
    pub fn new(num_motifs: usize) -> Self {
        CollectSink {
            matches: alloc::vec![Vec::new(); num_motifs],
        }
    }
}

impl MatchSink for CollectSink {
    fn record(&mut self, motif: usize, edges: &[EdgeId]) {
        self.matches[motif].push(edges.to_vec());
    }
}

/// Result of a mining run: per-motif counts, plus the matches themselves in
/// enumerate mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// Match count per query motif, in group order.
    pub counts: Vec<u64>,
    /// Enumerated matches per query motif (`None` in count mode).
    pub matches: Option<Vec<Vec<Vec<EdgeId>>>>,
}

/// Mines one motif with the baseline per-motif algorithm.
pub fn mine_single(g: &TemporalGraph, m: &Motif, delta: Time, mode: Mode) -> (MatchResult, MiningStats) {
    assert!(delta >= 0, "delta must be non-negative");
    let mut stats = MiningStats::new(1, m.edge_count());
    let mut ctx = MatchContext::new(g.num_vertices(), m.num_vertices());
    let mut count = 0u64;
    let matches = match mode {
        Mode::Count => {
            single_rec(g, m, delta, 0, &mut ctx, &mut count, &mut NullSink, &mut stats);
            None
        }
        Mode::Enumerate => {
            let mut sink = CollectSink::new(1);
            single_rec(g, m, delta, 0, &mut ctx, &mut count, &mut sink, &mut stats);
            Some(sink.matches)
        }
    };
    debug_assert!(ctx.is_clear());
    (
        MatchResult {
            counts: alloc::vec![count],
            matches,
        },
        stats,
    )
}

/// As [`mine_single`] but streaming matches into a caller-provided sink
/// (motif index is always 0); returns the count.
pub fn mine_single_with_sink(
    g: &TemporalGraph,
    m: &Motif,
    delta: Time,
    sink: &mut dyn MatchSink,
) -> (u64, MiningStats) {
    assert!(delta >= 0, "delta must be non-negative");
    let mut stats = MiningStats::new(1, m.edge_count());
    let mut ctx = MatchContext::new(g.num_vertices(), m.num_vertices());
    let mut count = 0u64;
    single_rec(g, m, delta, 0, &mut ctx, &mut count, sink, &mut stats);
    debug_assert!(ctx.is_clear());
    (count, stats)
}

fn single_rec<S: MatchSink + ?Sized>(
    g: &TemporalGraph,
    m: &Motif,
    delta: Time,
    rank: usize,
    ctx: &mut MatchContext,
    count: &mut u64,
    sink: &mut S,
    stats: &mut MiningStats,
) {
    if rank == m.edge_count() {
        *count += 1;
        stats.matches += 1;
        stats.node_completions[0] += 1;
        sink.record(0, ctx.e_stack());
        return;
    }
    let me = m.edges()[rank];
    let r = candidate_range(g, ctx, me.src, delta);
    for pos in r.lo..r.hi {
        let eid = g.candidate_edge(r.space, pos);
        let e = *g.edge(eid);
        stats.visit(0, rank);
        if !structural_ok(ctx, me, e.src, e.dst) {
            continue;
        }
        stats.expansions += 1;
        ctx.roll_on_edge(me.src, me.dst, e.src, e.dst);
        ctx.push_match(eid);
        single_rec(g, m, delta, rank + 1, ctx, count, sink, stats);
        ctx.pop_match();
        ctx.roll_back_edge(e.src, e.dst);
    }
}

/// Co-mines a whole motif group in one traversal of its tree.  Per-motif
/// results are identical to [`mine_single`] on each group member.
pub fn co_mine(g: &TemporalGraph, tree: &MgTree, delta: Time, mode: Mode) -> (MatchResult, MiningStats) {
    assert!(delta >= 0, "delta must be non-negative");
    let mut stats = MiningStats::new(tree.node_count(), tree.max_depth());
    let mut counts = alloc::vec![0u64; tree.motifs().len()];
    let mut ctx = MatchContext::new(g.num_vertices(), tree.max_vertices());
    let matches = match mode {
        Mode::Count => {
            co_rec(g, tree, 0, 0, delta, &mut ctx, &mut counts, &mut NullSink, &mut stats);
            None
        }
        Mode::Enumerate => {
            let mut sink = CollectSink::new(tree.motifs().len());
            co_rec(g, tree, 0, 0, delta, &mut ctx, &mut counts, &mut sink, &mut stats);
            Some(sink.matches)
        }
    };
    debug_assert!(ctx.is_clear());
    (MatchResult { counts, matches }, stats)
}

/// As [`co_mine`] but streaming matches into a caller-provided sink;
/// returns per-motif counts.
pub fn co_mine_with_sink(
    g: &TemporalGraph,
    tree: &MgTree,
    delta: Time,
    sink: &mut dyn MatchSink,
) -> (Vec<u64>, MiningStats) {
    assert!(delta >= 0, "delta must be non-negative");
    let mut stats = MiningStats::new(tree.node_count(), tree.max_depth());
    let mut counts = alloc::vec![0u64; tree.motifs().len()];
    let mut ctx = MatchContext::new(g.num_vertices(), tree.max_vertices());
    co_rec(g, tree, 0, 0, delta, &mut ctx, &mut counts, sink, &mut stats);
    debug_assert!(ctx.is_clear());
    (counts, stats)
}

/// One recursion step of co-mining: within a node, iterate candidates for
/// the edge at `rank`; at a node boundary, emit the node's query count (if
/// any) first, then descend into each child at the same rank with the
/// current stack as the shared partial match.
fn co_rec<S: MatchSink + ?Sized>(
    g: &TemporalGraph,
    tree: &MgTree,
    gid: u32,
    rank: usize,
    delta: Time,
    ctx: &mut MatchContext,
    counts: &mut [u64],
    sink: &mut S,
    stats: &mut MiningStats,
) {
    let node = tree.node(gid);
    if rank == node.common.len() {
        stats.node_completions[gid as usize] += 1;
        if let Some(q) = node.query_ref {
            counts[q] += 1;
            stats.matches += 1;
            sink.record(q, ctx.e_stack());
        }
        for &c in &node.children {
            co_rec(g, tree, c, rank, delta, ctx, counts, sink, stats);
        }
        return;
    }
    let me = node.common[rank];
    let r = candidate_range(g, ctx, me.src, delta);
    for pos in r.lo..r.hi {
        let eid = g.candidate_edge(r.space, pos);
        let e = *g.edge(eid);
        stats.visit(gid, rank);
        if !structural_ok(ctx, me, e.src, e.dst) {
            continue;
        }
        stats.expansions += 1;
        ctx.roll_on_edge(me.src, me.dst, e.src, e.dst);
        ctx.push_match(eid);
        co_rec(g, tree, gid, rank + 1, delta, ctx, counts, sink, stats);
        ctx.pop_match();
        ctx.roll_back_edge(e.src, e.dst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TemporalGraph;
    use crate::mgtree::MgNode;
    use crate::oracle::brute_force_count;
    use alloc::string::String;

    fn motif(name: &str, edges: &[(u32, u32)]) -> Motif {
        Motif::new(name, edges.iter().copied()).unwrap()
    }

    fn graph(triples: &[(u32, u32, i64)]) -> TemporalGraph {
        TemporalGraph::from_triples(triples)
    }

    #[test]
    fn roll_on_sets_maps_and_counts() {
        let mut ctx = MatchContext::new(10, 4);
        ctx.roll_on_edge(0, 1, 7, 3);
        assert_eq!(ctx.mapped(0), Some(7));
        assert_eq!(ctx.mapped(1), Some(3));
        assert_eq!(ctx.motif_vertex_of(7), Some(0));
        assert_eq!(ctx.incident_count(7), 1);
        assert_eq!(ctx.incident_count(3), 1);
    }

    #[test]
    fn shared_vertex_increments_incidence() {
        let mut ctx = MatchContext::new(10, 4);
        // Chain 0→1→2 over graph vertices 7→3→5; vertex 3 is shared.
        ctx.roll_on_edge(0, 1, 7, 3);
        ctx.roll_on_edge(1, 2, 3, 5);
        assert_eq!(ctx.incident_count(3), 2);
        ctx.roll_back_edge(3, 5);
        // Vertex 3 still held by the first edge; 5 released.
        assert_eq!(ctx.mapped(1), Some(3));
        assert_eq!(ctx.mapped(2), None);
        assert_eq!(ctx.motif_vertex_of(5), None);
        ctx.roll_back_edge(7, 3);
        assert!(ctx.is_clear());
    }

    #[test]
    fn roll_on_roll_back_restores_exact_state() {
        let mut ctx = MatchContext::new(6, 3);
        ctx.roll_on_edge(0, 1, 4, 2);
        let snapshot = ctx.clone();
        ctx.roll_on_edge(1, 2, 2, 0);
        ctx.roll_back_edge(2, 0);
        assert_eq!(ctx, snapshot);
        // Full 3-cycle unwind returns to empty.
        ctx.roll_on_edge(1, 2, 2, 0);
        ctx.roll_on_edge(2, 0, 0, 4);
        ctx.roll_back_edge(0, 4);
        ctx.roll_back_edge(2, 0);
        ctx.roll_back_edge(4, 2);
        assert!(ctx.is_clear());
    }

    #[test]
    #[should_panic(expected = "underflow")]
    fn roll_back_without_roll_on_panics() {
        let mut ctx = MatchContext::new(4, 2);
        ctx.roll_back_edge(0, 1);
    }

    #[test]
    fn check_candidate_reports_reasons() {
        let g = graph(&[(0, 1, 1), (1, 2, 2), (2, 0, 50)]);
        let m = motif("m", &[(0, 1), (0, 2)]);
        let mut ctx = MatchContext::new(3, 3);
        // First rank: everything is accepted (temporal checks vacuous).
        for e in g.edges() {
            assert_eq!(check_candidate(&ctx, &g, m.edges()[0], e, 5), Ok(()));
        }
        // Match edge 1 (1→2@2), then test the second rank.
        let e1 = *g.edge(1);
        ctx.roll_on_edge(0, 1, e1.src, e1.dst);
        ctx.push_match(1);
        let earlier = *g.edge(0);
        assert_eq!(
            check_candidate(&ctx, &g, m.edges()[1], &earlier, 1000),
            Err(Rejection::TemporalOrder)
        );
        let late = *g.edge(2);
        assert_eq!(
            check_candidate(&ctx, &g, m.edges()[1], &late, 10),
            Err(Rejection::Window)
        );
        // Within the window, but its source 2 is not graph vertex 1, the
        // image of motif vertex 0 → structural conflict.
        assert_eq!(
            check_candidate(&ctx, &g, m.edges()[1], &late, 1000),
            Err(Rejection::Structural)
        );
    }

    #[test]
    fn structural_rejects_remapping_a_mapped_destination() {
        let mut ctx = MatchContext::new(5, 4);
        ctx.roll_on_edge(0, 1, 0, 1);
        // Motif edge 2→1: destination motif vertex 1 is mapped to graph
        // vertex 1, so an edge into vertex 3 conflicts.
        assert!(!structural_ok(&ctx, MotifEdge { src: 2, dst: 1 }, 4, 3));
        assert!(structural_ok(&ctx, MotifEdge { src: 2, dst: 1 }, 4, 1));
        // Fresh endpoints may not collapse onto one graph vertex.
        assert!(!structural_ok(&ctx, MotifEdge { src: 2, dst: 3 }, 4, 4));
    }

    #[test]
    fn empty_graph_has_no_matches() {
        let g = TemporalGraph::from_triples(&[]);
        let m = motif("m", &[(0, 1), (1, 2)]);
        let (res, stats) = mine_single(&g, &m, 100, Mode::Count);
        assert_eq!(res.counts, vec![0]);
        assert_eq!(stats.visits, 0);
    }

    #[test]
    fn one_edge_motif_counts_non_loop_edges() {
        let g = graph(&[(0, 1, 1), (2, 2, 2), (3, 4, 3), (1, 0, 9)]);
        let m = motif("m", &[(0, 1)]);
        let (res, _) = mine_single(&g, &m, 1, Mode::Count);
        // The self-loop 2→2 cannot match distinct motif endpoints.
        assert_eq!(res.counts, vec![3]);
        assert_eq!(res.counts[0], brute_force_count(&g, &m, 1).unwrap());
    }

    #[test]
    fn three_cycle_window_boundary() {
        let g = graph(&[(0, 1, 1), (1, 2, 2), (2, 0, 3)]);
        let m = motif("tri", &[(0, 1), (1, 2), (2, 0)]);
        let (res, _) = mine_single(&g, &m, 30, Mode::Count);
        assert_eq!(res.counts, vec![1]);
        // Window: span is 3−1=2 > 1 → no match at δ=1, exactly 1 at δ=2.
        assert_eq!(mine_single(&g, &m, 1, Mode::Count).0.counts, vec![0]);
        assert_eq!(mine_single(&g, &m, 2, Mode::Count).0.counts, vec![1]);
        for delta in [1, 2, 30] {
            assert_eq!(
                mine_single(&g, &m, delta, Mode::Count).0.counts[0],
                brute_force_count(&g, &m, delta).unwrap()
            );
        }
    }

    #[test]
    fn injectivity_forbids_closing_back_onto_the_start() {
        // 2-edge path a→b→c on {A→B@1, B→A@2, B→C@3}: (A→B, B→A) would
        // need c = a, which injectivity forbids; (B→A@2, A→…) has no
        // later out-edge of A.  Only (A→B@1, B→C@3) remains.
        let g = graph(&[(0, 1, 1), (1, 0, 2), (1, 2, 3)]);
        let m = motif("path", &[(0, 1), (1, 2)]);
        let (res, _) = mine_single(&g, &m, 10, Mode::Count);
        assert_eq!(res.counts, vec![1]);
        assert_eq!(res.counts[0], brute_force_count(&g, &m, 10).unwrap());
        // The ping-pong motif a→b→a is the one that matches the bounce.
        let pp = motif("pp", &[(0, 1), (1, 0)]);
        let (res, _) = mine_single(&g, &pp, 10, Mode::Count);
        assert_eq!(res.counts, vec![1]);
        assert_eq!(res.counts[0], brute_force_count(&g, &pp, 10).unwrap());
    }

    fn walkthrough_tree() -> MgTree {
        MgTree::build(&[
            motif("M3", &[(0, 1), (1, 2), (2, 0)]),
            motif("M4", &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            motif("M5", &[(0, 1), (1, 2), (2, 3), (0, 3)]),
        ])
        .unwrap()
    }

    #[test]
    fn co_mine_matches_walkthrough_counts() {
        // A→B@1, B→C@2, C→A@3, C→D@4, D→A@5.
        let g = graph(&[(0, 1, 1), (1, 2, 2), (2, 0, 3), (2, 3, 4), (3, 0, 5)]);
        let tree = walkthrough_tree();
        let (res, stats) = co_mine(&g, &tree, 100, Mode::Count);
        assert_eq!(res.counts, vec![1, 1, 0]);
        for (i, m) in tree.motifs().iter().enumerate() {
            assert_eq!(res.counts[i], brute_force_count(&g, m, 100).unwrap());
        }
        assert_eq!(stats.matches, 2);
        // The shared 2-edge path prefix completes for A→B→C, B→C→A,
        // B→C→D and C→D→A.
        assert_eq!(stats.node_completions[0], 4);
    }

    #[test]
    fn single_motif_tree_equals_mine_single_exactly() {
        let g = graph(&[
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 3),
            (0, 2, 4),
            (2, 1, 5),
            (1, 0, 6),
        ]);
        let m = motif("tri", &[(0, 1), (1, 2), (2, 0)]);
        let tree = MgTree::build(core::slice::from_ref(&m)).unwrap();
        for delta in [0, 1, 2, 3, 10] {
            let (single, s_stats) = mine_single(&g, &m, delta, Mode::Enumerate);
            let (co, c_stats) = co_mine(&g, &tree, delta, Mode::Enumerate);
            assert_eq!(single.counts, co.counts);
            assert_eq!(single.matches, co.matches);
            // Same traversal shape → same visit counts.
            assert_eq!(s_stats.visits, c_stats.visits);
            assert_eq!(s_stats.expansions, c_stats.expansions);
        }
    }

    #[test]
    fn co_mine_agrees_per_motif_with_mine_single() {
        let g = graph(&[
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 3),
            (2, 3, 4),
            (3, 0, 5),
            (0, 3, 5),
            (1, 2, 6),
            (2, 0, 7),
        ]);
        let tree = walkthrough_tree();
        for delta in [1, 3, 5, 100] {
            let (co, _) = co_mine(&g, &tree, delta, Mode::Enumerate);
            for (i, m) in tree.motifs().iter().enumerate() {
                let (single, _) = mine_single(&g, m, delta, Mode::Enumerate);
                assert_eq!(co.counts[i], single.counts[0], "delta {delta} motif {i}");
                let mut a = co.matches.as_ref().unwrap()[i].clone();
                let mut b = single.matches.as_ref().unwrap()[0].clone();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn enumerate_mode_invariants_hold() {
        let g = graph(&[(0, 1, 1), (1, 2, 2), (2, 0, 3), (1, 2, 3), (2, 0, 4)]);
        let tree = walkthrough_tree();
        let (res, _) = co_mine(&g, &tree, 100, Mode::Enumerate);
        let matches = res.matches.unwrap();
        for (i, per_motif) in matches.iter().enumerate() {
            assert_eq!(res.counts[i] as usize, per_motif.len());
            for m in per_motif {
                assert_eq!(m.len(), tree.motifs()[i].edge_count());
                assert!(m.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn empty_common_root_iterates_children_at_depth_zero() {
        let a = motif("A", &[(0, 1), (1, 2)]);
        let b = motif("B", &[(1, 0), (0, 2)]);
        let tree = MgTree::from_parts(
            vec![
                MgNode {
                    gid: 0,
                    label: String::new(),
                    common: vec![],
                    children: vec![1, 2],
                    query_ref: None,
                },
                MgNode {
                    gid: 1,
                    label: String::new(),
                    common: a.edges().to_vec(),
                    children: vec![],
                    query_ref: Some(0),
                },
                MgNode {
                    gid: 2,
                    label: String::new(),
                    common: b.edges().to_vec(),
                    children: vec![],
                    query_ref: Some(1),
                },
            ],
            vec![a.clone(), b.clone()],
        )
        .unwrap();
        let g = graph(&[(0, 1, 1), (1, 2, 2), (1, 0, 3), (0, 2, 4), (2, 1, 5)]);
        let (res, stats) = co_mine(&g, &tree, 100, Mode::Count);
        assert_eq!(res.counts[0], mine_single(&g, &a, 100, Mode::Count).0.counts[0]);
        assert_eq!(res.counts[1], mine_single(&g, &b, 100, Mode::Count).0.counts[0]);
        // The empty prefix "completes" exactly once.
        assert_eq!(stats.node_completions[0], 1);
    }

    #[test]
    fn co_mining_visits_fewer_candidates_than_individual_runs() {
        let g = graph(&[
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 3),
            (2, 3, 4),
            (3, 0, 5),
            (0, 1, 6),
            (1, 2, 7),
            (2, 3, 8),
        ]);
        let tree = walkthrough_tree();
        let (_, co_stats) = co_mine(&g, &tree, 100, Mode::Count);
        let individual: u64 = tree
            .motifs()
            .iter()
            .map(|m| mine_single(&g, m, 100, Mode::Count).1.visits)
            .sum();
        assert!(co_stats.visits < individual, "{} vs {individual}", co_stats.visits);
    }

    #[test]
    fn candidate_ranges_equal_full_scan_with_check_candidate() {
        let g = graph(&[
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 2),
            (1, 0, 3),
            (0, 2, 4),
            (2, 1, 5),
            (1, 2, 5),
        ]);
        let m = motif("m", &[(0, 1), (1, 2), (0, 2)]);
        let mut ctx = MatchContext::new(3, 3);
        let delta = 3;
        // Build a depth-1 context, then compare the range against a filter
        // over every edge for the rank-2 pattern edge.
        let e0 = *g.edge(0);
        ctx.roll_on_edge(0, 1, e0.src, e0.dst);
        ctx.push_match(0);
        for rank in [1usize, 2] {
            let me = m.edges()[rank];
            let r = candidate_range(&g, &ctx, me.src, delta);
            let from_range: Vec<EdgeId> = (r.lo..r.hi)
                .map(|p| g.candidate_edge(r.space, p))
                .filter(|&eid| {
                    let e = g.edge(eid);
                    structural_ok(&ctx, me, e.src, e.dst)
                })
                .collect();
            let from_scan: Vec<EdgeId> = g
                .edges()
                .iter()
                .filter(|e| check_candidate(&ctx, &g, me, e, delta).is_ok())
                .map(|e| e.id)
                .collect();
            assert_eq!(from_range, from_scan, "rank {rank}");
        }
    }
}
