//! Resumable search engine: the co-mining recursion made iterative so a
//! worker can pause mid-search, dump its position, split the remainder into
//! independent contexts, and let other workers replay disjoint parts.
//!
//! The invariant that makes all of this safe: a [`SearchContext`] is a pure
//! frame stack whose cursors are always *past* the candidates already taken.
//! Edges on the current search path are pinned by `entered` markers (so the
//! partial match can be reconstructed) but can never be re-scanned — the
//! positional form of marking path edges skip-only.  Query matches are
//! emitted exactly when a node boundary is first reached, never on replay,
//! so no split or handoff can double-count.

use comine_core::graph::{CandSpace, EdgeId, TemporalGraph, Time};
use comine_core::mgtree::MgTree;
use comine_core::miner::{candidate_range, check_candidate, MatchContext, MiningStats};
use comine_core::motif::Mode;
use serde::{Deserialize, Serialize};

/// One level of the iterative search: either a candidate scan for one motif
/// edge, or a node boundary stepping through child nodes.
///
/// `entered` is the graph edge whose successful match created this frame;
/// popping the frame rolls that edge back.  Frames created by descending
/// into a child at a node boundary carry `None` (no edge was consumed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Scanning candidate positions `cursor..end` of `space` for the motif
    /// edge at `rank` of `node`'s common motif.
    Cand {
        /// Tree node being matched.
        node: u32,
        /// Motif-edge rank (search depth) being scanned.
        rank: u32,
        /// Candidate address space of this scan.
        space: CandSpace,
        /// Next position to examine.
        cursor: u32,
        /// Exclusive end of the scan.
        end: u32,
        /// Edge rolled on to create this frame.
        entered: Option<EdgeId>,
    },
    /// `node`'s common motif is fully matched; children
    /// `next_child..end_child` remain to be explored at the same depth.
    Node {
        /// Tree node whose boundary this is.
        node: u32,
        /// Index of the next unexplored child.
        next_child: u32,
        /// Exclusive end of this frame's child slice.
        end_child: u32,
        /// Edge rolled on to create this frame.
        entered: Option<EdgeId>,
    },
}

impl Frame {
    fn entered(&self) -> Option<EdgeId> {
        match *self {
            Frame::Cand { entered, .. } | Frame::Node { entered, .. } => entered,
        }
    }

    fn has_work(&self) -> bool {
        self.width() > 0
    }

    /// Remaining candidates (or children) this frame will still take.
    fn width(&self) -> u32 {
        match *self {
            Frame::Cand { cursor, end, .. } => end - cursor,
            Frame::Node {
                next_child,
                end_child,
                ..
            } => end_child - next_child,
        }
    }

    fn exhaust(&mut self) {
        match self {
            Frame::Cand { cursor, end, .. } => *cursor = *end,
            Frame::Node {
                next_child,
                end_child,
                ..
            } => *next_child = *end_child,
        }
    }
}

/// A dumped, resumable search position: the frame stack from the root down
/// to the level that was being scanned when the owner paused.
///
/// Replaying a context explores exactly the leaves its owner still had in
/// front of it — no more, no fewer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchContext {
    frames: Vec<Frame>,
}

impl SearchContext {
    /// The frame stack, root first.
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// True when no frame has candidates or children left.
    pub fn is_exhausted(&self) -> bool {
        self.frames.iter().all(|f| !f.has_work())
    }

    /// Stack depth.
    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    /// Total remaining candidate/child width across all levels — a cheap
    /// splittability measure.
    pub fn remaining_width(&self) -> u64 {
        self.frames.iter().map(|f| u64::from(f.width())).sum()
    }
}

/// Results accumulated by one worker across every context it processes.
#[derive(Debug, Clone, PartialEq)]
pub struct Harvest {
    /// Per-motif match counts, indexed like `tree.motifs()`.
    pub counts: Vec<u64>,
    /// Per-motif match edge lists; populated only in enumerate mode.
    pub matches: Vec<Vec<Vec<EdgeId>>>,
    /// Search counters.
    pub stats: MiningStats,
}

impl Harvest {
    /// Zeroed harvest shaped for `tree`.
    pub fn new(tree: &MgTree) -> Self {
        Harvest {
            counts: vec![0; tree.motifs().len()],
            matches: vec![Vec::new(); tree.motifs().len()],
            stats: MiningStats::new(tree.node_count(), tree.max_depth()),
        }
    }

    /// Accumulates another worker's harvest into this one.
    pub fn absorb(&mut self, other: &Harvest) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            a.extend_from_slice(b);
        }
        self.stats.merge(&other.stats);
    }
}

/// Why [`Engine::step`] returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// The visit budget ran out; more work remains.
    Paused,
    /// The context is fully explored.
    Finished,
}

/// Iterative co-mining engine over one context's worth of work.
///
/// Single-threaded; the runtime owns one engine per busy worker.  Visits,
/// expansions, and matches go into the [`Harvest`] passed to each call, so
/// a worker can carry one harvest across many engines.
pub struct Engine<'a> {
    g: &'a TemporalGraph,
    tree: &'a MgTree,
    delta: Time,
    mode: Mode,
    frames: Vec<Frame>,
    ctx: MatchContext,
}

impl<'a> Engine<'a> {
    /// Fresh engine positioned at the tree root over the whole graph.
    ///
    /// Root-boundary effects are recorded into `harvest` here, exactly once:
    /// a root with an empty common motif completes immediately, before any
    /// candidate is scanned.
    pub fn start(
        g: &'a TemporalGraph,
        tree: &'a MgTree,
        delta: Time,
        mode: Mode,
        harvest: &mut Harvest,
    ) -> Self {
        assert!(delta >= 0, "delta must be non-negative");
        let mut eng = Engine {
            g,
            tree,
            delta,
            mode,
            frames: Vec::new(),
            ctx: MatchContext::new(g.num_vertices(), tree.max_vertices()),
        };
        eng.enter(0, 0, None, harvest);
        eng
    }

    /// Rebuilds an engine from a dumped context.  Replay emits nothing for
    /// the frames already on the stack; only newly reached boundaries count.
    pub fn resume(
        g: &'a TemporalGraph,
        tree: &'a MgTree,
        delta: Time,
        mode: Mode,
        dump: &SearchContext,
    ) -> Self {
        let mut ctx = MatchContext::new(g.num_vertices(), tree.max_vertices());
        for f in &dump.frames {
            if let Some(e_id) = f.entered() {
                let me = match *f {
                    Frame::Cand { node, rank, .. } => tree.node(node).common[rank as usize - 1],
                    Frame::Node { node, .. } => *tree
                        .node(node)
                        .common
                        .last()
                        .expect("node frame with an entered edge but empty common"),
                };
                let e = g.edge(e_id);
                ctx.roll_on_edge(me.src, me.dst, e.src, e.dst);
                ctx.push_match(e_id);
            }
        }
        Engine {
            g,
            tree,
            delta,
            mode,
            frames: dump.frames.clone(),
            ctx,
        }
    }

    /// Runs until `budget` candidates have been visited or the context is
    /// exhausted.  Pausing always lands between steps, so [`Engine::dump`]
    /// is valid afterwards.
    pub fn step(&mut self, budget: u64, harvest: &mut Harvest) -> StepOutcome {
        let mut seen = 0u64;
        while seen < budget {
            let Some(&top) = self.frames.last() else {
                debug_assert!(self.ctx.is_clear());
                return StepOutcome::Finished;
            };
            match top {
                Frame::Cand {
                    node,
                    rank,
                    space,
                    cursor,
                    end,
                    ..
                } => {
                    if cursor == end {
                        self.leave();
                        continue;
                    }
                    match self.frames.last_mut() {
                        Some(Frame::Cand { cursor, .. }) => *cursor += 1,
                        _ => unreachable!(),
                    }
                    seen += 1;
                    harvest.stats.visit(node, rank as usize);
                    let e_id = self.g.candidate_edge(space, cursor);
                    let e = self.g.edge(e_id);
                    let me = self.tree.node(node).common[rank as usize];
                    if check_candidate(&self.ctx, self.g, me, e, self.delta).is_ok() {
                        harvest.stats.expansions += 1;
                        let (gu, gv) = (e.src, e.dst);
                        self.ctx.roll_on_edge(me.src, me.dst, gu, gv);
                        self.ctx.push_match(e_id);
                        self.enter(node, rank + 1, Some(e_id), harvest);
                    }
                }
                Frame::Node {
                    node,
                    next_child,
                    end_child,
                    ..
                } => {
                    if next_child == end_child {
                        self.leave();
                        continue;
                    }
                    match self.frames.last_mut() {
                        Some(Frame::Node { next_child, .. }) => *next_child += 1,
                        _ => unreachable!(),
                    }
                    let child = self.tree.node(node).children[next_child as usize];
                    let rank = self.tree.node(node).common.len() as u32;
                    self.enter(child, rank, None, harvest);
                }
            }
        }
        if self.frames.is_empty() {
            StepOutcome::Finished
        } else {
            StepOutcome::Paused
        }
    }

    /// Runs the context to completion.
    pub fn run_to_end(&mut self, harvest: &mut Harvest) {
        while self.step(u64::MAX, harvest) == StepOutcome::Paused {}
    }

    /// True when nothing remains.
    pub fn finished(&self) -> bool {
        self.frames.is_empty()
    }

    /// Snapshot of the current position; safe to replay elsewhere.
    pub fn dump(&self) -> SearchContext {
        SearchContext {
            frames: self.frames.clone(),
        }
    }

    /// Hands the next unexplored child of the deepest node boundary to a
    /// fresh context sharing the current partial match; this engine will
    /// skip that child.  One sibling per call.  `None` when no boundary on
    /// the stack has children left.
    pub fn sibling_handoff(&mut self) -> Option<SearchContext> {
        let i = self.frames.iter().rposition(|f| {
            matches!(f, Frame::Node { next_child, end_child, .. } if next_child < end_child)
        })?;
        let c = match self.frames[i] {
            Frame::Node { next_child, .. } => next_child,
            _ => unreachable!(),
        };
        let mut frames = self.frames[..=i].to_vec();
        for f in &mut frames[..i] {
            f.exhaust();
        }
        if let Frame::Node {
            next_child,
            end_child,
            ..
        } = &mut frames[i]
        {
            *next_child = c;
            *end_child = c + 1;
        }
        if let Frame::Node { next_child, .. } = &mut self.frames[i] {
            *next_child = c + 1;
        }
        Some(SearchContext { frames })
    }

    /// Pushes the entry frame for `node` at `rank`: a candidate scan while
    /// the common motif still has edges, a node boundary once it is fully
    /// matched.  Boundary effects (completion counters, query emission) fire
    /// here — the single emission point of the engine.
    fn enter(&mut self, node: u32, rank: u32, entered: Option<EdgeId>, harvest: &mut Harvest) {
        let n = self.tree.node(node);
        if rank as usize == n.common.len() {
            harvest.stats.node_completions[node as usize] += 1;
            if let Some(q) = n.query_ref {
                harvest.counts[q] += 1;
                harvest.stats.matches += 1;
                if self.mode == Mode::Enumerate {
                    harvest.matches[q].push(self.ctx.e_stack().to_vec());
                }
            }
            self.frames.push(Frame::Node {
                node,
                next_child: 0,
                end_child: n.children.len() as u32,
                entered,
            });
        } else {
            let me = n.common[rank as usize];
            let range = candidate_range(self.g, &self.ctx, me.src, self.delta);
            self.frames.push(Frame::Cand {
                node,
                rank,
                space: range.space,
                cursor: range.lo,
                end: range.hi,
                entered,
            });
        }
    }

    fn leave(&mut self) {
        let f = self.frames.pop().expect("leave on an empty stack");
        if let Some(e_id) = f.entered() {
            let popped = self.ctx.pop_match();
            debug_assert_eq!(popped, Some(e_id));
            let e = self.g.edge(e_id);
            self.ctx.roll_back_edge(e.src, e.dst);
        }
    }
}

/// Decomposes a dumped context into independent contexts whose replays
/// together cover the remaining work exactly once, then widens candidate
/// ranges until at least `target` contexts exist (where the work divides).
///
/// Per level, deepest first: the level's remaining candidate range — or
/// each remaining child of a node boundary — becomes its own context, with
/// every shallower frame pinned to the shared partial match but marked
/// exhausted.  The exploration already in flight below a level is never
/// duplicated because each cursor has advanced past it.  An exhausted
/// context yields an empty list.
pub fn split_context(ctx: &SearchContext, tree: &MgTree, target: usize) -> Vec<SearchContext> {
    debug_assert!(ctx.frames.iter().all(|f| match *f {
        Frame::Cand { node, .. } | Frame::Node { node, .. } => (node as usize) < tree.node_count(),
    }));
    let k = ctx.frames.len();
    let mut out: Vec<SearchContext> = Vec::new();
    for i in (0..k).rev() {
        let f = ctx.frames[i];
        if !f.has_work() {
            continue;
        }
        let mut frames = ctx.frames[..=i].to_vec();
        for a in &mut frames[..i] {
            a.exhaust();
        }
        match f {
            Frame::Cand { .. } => out.push(SearchContext { frames }),
            Frame::Node {
                next_child,
                end_child,
                ..
            } => {
                // One fresh context per unexplored sibling at this depth.
                for c in next_child..end_child {
                    let mut fr = frames.clone();
                    if let Frame::Node {
                        next_child,
                        end_child,
                        ..
                    } = &mut fr[i]
                    {
                        *next_child = c;
                        *end_child = c + 1;
                    }
                    out.push(SearchContext { frames: fr });
                }
            }
        }
    }
    widen(&mut out, target);
    out
}

/// Splits the widest active candidate range into near-even pieces until
/// `target` contexts exist or nothing is splittable.
fn widen(out: &mut Vec<SearchContext>, target: usize) {
    while out.len() < target {
        let Some((j, width)) = out
            .iter()
            .enumerate()
            .filter_map(|(j, c)| match c.frames.last() {
                Some(&Frame::Cand { cursor, end, .. }) if end - cursor >= 2 => {
                    Some((j, end - cursor))
                }
                _ => None,
            })
            .max_by_key(|&(_, w)| w)
        else {
            break;
        };
        let parts = ((target - out.len() + 1).min(width as usize)) as u32;
        let base = out.swap_remove(j);
        let (lo, hi) = match base.frames.last() {
            Some(&Frame::Cand { cursor, end, .. }) => (cursor, end),
            _ => unreachable!(),
        };
        let chunk = width.div_ceil(parts);
        let mut start = lo;
        while start < hi {
            let stop = (start + chunk).min(hi);
            let mut fr = base.frames.clone();
            if let Some(Frame::Cand { cursor, end, .. }) = fr.last_mut() {
                *cursor = start;
                *end = stop;
            }
            out.push(SearchContext { frames: fr });
            start = stop;
        }
    }
}
