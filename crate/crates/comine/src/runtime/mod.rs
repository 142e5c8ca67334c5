//! Parallel execution of co-mining with deterministic results.
//!
//! Three balancing strategies over OS worker threads:
//!
//! - `none` — the root candidate range is cut into one static chunk per
//!   worker; no redistribution ever happens.
//! - `dynamic` — the root range is cut into many small work items feeding a
//!   shared queue that idle workers pull from.
//! - `context_split` — `dynamic`, plus: busy workers donate unexplored
//!   sibling subtrees to starving workers, and epoch boundaries let any
//!   worker trigger a gap in which every busy worker dumps its search
//!   context, splits it, and requeues the pieces for redistribution.
//!
//! Whatever the strategy and worker count, the result equals a
//! single-threaded run: contexts partition the search space exactly, and
//! emission happens only when a node boundary is first reached, never on
//! replay.  Total visit counts are likewise preserved — splitting moves
//! work, it does not repeat any.

pub mod engine;

pub use engine::{split_context, Engine, Frame, Harvest, SearchContext, StepOutcome};

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering::Relaxed};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Instant;

use comine_core::graph::{TemporalGraph, Time};
use comine_core::mgtree::MgTree;
use comine_core::miner::{MatchResult, MiningStats};
use comine_core::motif::{Balance, Mode};
use serde::{Deserialize, Serialize};

/// Scheduling thresholds for `context_split`; see the environment variables
/// `COMINE_INTER_INTRVL`, `COMINE_INTRA_INTRVL`, and `COMINE_IDLE_FRAC`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeConfig {
    /// Candidates a worker processes between epoch-boundary checks (where a
    /// gap may be initiated).
    pub inter_interval: u64,
    /// Candidates between cheap polls for gap requests and handoff
    /// opportunities.
    pub intra_interval: u64,
    /// Idle-worker fraction at or above which an epoch boundary triggers a
    /// gap.
    pub idle_frac: f64,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        RuntimeConfig {
            inter_interval: 4096,
            intra_interval: 64,
            idle_frac: 0.25,
        }
    }
}

impl RuntimeConfig {
    /// Defaults overridden by environment variables where set and parseable;
    /// malformed values are ignored.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(v) = env_parse::<u64>("COMINE_INTER_INTRVL") {
            cfg.inter_interval = v.max(1);
        }
        if let Some(v) = env_parse::<u64>("COMINE_INTRA_INTRVL") {
            cfg.intra_interval = v.max(1);
        }
        if let Some(v) = env_parse::<f64>("COMINE_IDLE_FRAC") {
            if (0.0..=1.0).contains(&v) {
                cfg.idle_frac = v;
            }
        }
        cfg
    }
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Option<T> {
    std::env::var(name).ok()?.trim().parse().ok()
}

/// One worker's share of the counters, for skew diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerStats {
    /// Candidates this worker examined.
    pub visits: u64,
    /// Candidates it accepted and recursed into.
    pub expansions: u64,
    /// Query matches it emitted.
    pub matches: u64,
    /// Time spent mining (excludes queue waits).
    pub busy_ms: f64,
}

/// Everything measured about one parallel run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Worker threads used.
    pub workers: usize,
    /// Balancing strategy used.
    pub balance: Balance,
    /// End-to-end run time.
    pub wall_ms: f64,
    /// Rebalancing gaps triggered (context_split only).
    pub epochs: u64,
    /// Sibling subtrees donated to idle workers (context_split only).
    pub handoffs: u64,
    /// Match density: total matches divided by the number of graph edges.
    pub match_density: f64,
    /// Merged search counters; identical across worker counts and balance
    /// modes for the same input.
    pub totals: MiningStats,
    /// Per-worker breakdown.
    pub per_worker: Vec<WorkerStats>,
}

/// Splits every context and deals the pieces round-robin across `workers`.
///
/// This is the declarative form of what a gap does; the pool implements the
/// same policy in distributed form (each busy worker splits its own context
/// into the shared queue, and idle workers pull — round-robin by
/// availability).
pub fn rebalance_epoch(
    contexts: &[SearchContext],
    tree: &MgTree,
    workers: usize,
) -> Vec<Vec<SearchContext>> {
    assert!(workers >= 1, "need at least one worker");
    let mut assignment = vec![Vec::new(); workers];
    let mut slot = 0usize;
    for ctx in contexts {
        for piece in split_context(ctx, tree, workers) {
            assignment[slot % workers].push(piece);
            slot += 1;
        }
    }
    assignment
}

/// Mines `tree` over `g` with `workers` threads under the given balancing
/// strategy.  The result — counts, and in enumerate mode the per-motif
/// match lists sorted ascending — is identical to a single-threaded run
/// regardless of `workers` and `balance`.
pub fn run_parallel(
    g: &TemporalGraph,
    tree: &MgTree,
    delta: Time,
    mode: Mode,
    workers: usize,
    balance: Balance,
    cfg: &RuntimeConfig,
) -> (MatchResult, RunStats) {
    assert!(workers >= 1, "need at least one worker");
    let wall = Instant::now();

    // The prototype engine records root-boundary effects exactly once; all
    // worker contexts descend from its dump.
    let mut total = Harvest::new(tree);
    let initial = Engine::start(g, tree, delta, mode, &mut total).dump();

    let (results, epochs, handoffs) = match balance {
        Balance::None => (static_run(g, tree, delta, mode, workers, &initial), 0, 0),
        Balance::Dynamic => pooled_run(g, tree, delta, mode, workers, &initial, None),
        Balance::ContextSplit => pooled_run(g, tree, delta, mode, workers, &initial, Some(cfg)),
    };

    let mut per_worker = Vec::with_capacity(results.len());
    for (h, busy_ms) in &results {
        per_worker.push(WorkerStats {
            visits: h.stats.visits,
            expansions: h.stats.expansions,
            matches: h.stats.matches,
            busy_ms: *busy_ms,
        });
        total.absorb(h);
    }

    let Harvest {
        counts,
        matches,
        stats,
    } = total;
    let matches = match mode {
        Mode::Count => None,
        Mode::Enumerate => {
            let mut per = matches;
            for list in &mut per {
                list.sort_unstable();
            }
            Some(per)
        }
    };
    let match_density = if g.num_edges() == 0 {
        0.0
    } else {
        stats.matches as f64 / g.num_edges() as f64
    };
    let run = RunStats {
        workers,
        balance,
        wall_ms: wall.elapsed().as_secs_f64() * 1e3,
        epochs,
        handoffs,
        match_density,
        totals: stats,
        per_worker,
    };
    (MatchResult { counts, matches }, run)
}

/// Static chunking: the initial context is cut into `workers` pieces dealt
/// round-robin; each worker mines its pieces to completion with no
/// redistribution.
fn static_run(
    g: &TemporalGraph,
    tree: &MgTree,
    delta: Time,
    mode: Mode,
    workers: usize,
    initial: &SearchContext,
) -> Vec<(Harvest, f64)> {
    let chunks = split_context(initial, tree, workers);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let my: Vec<&SearchContext> = chunks.iter().skip(w).step_by(workers).collect();
                s.spawn(move || {
                    let t0 = Instant::now();
                    let mut h = Harvest::new(tree);
                    for ctx in my {
                        Engine::resume(g, tree, delta, mode, ctx).run_to_end(&mut h);
                    }
                    (h, t0.elapsed().as_secs_f64() * 1e3)
                })
            })
            .collect();
        handles.into_iter().map(|j| j.join().unwrap()).collect()
    })
}

struct PoolState {
    queue: VecDeque<SearchContext>,
    idle: usize,
    done: bool,
}

/// Shared queue plus the lock-free mirrors busy workers poll.
struct Pool {
    state: Mutex<PoolState>,
    cv: Condvar,
    workers: usize,
    idle_count: AtomicUsize,
    queue_len: AtomicUsize,
    epoch: AtomicU64,
    handoffs: AtomicU64,
}

impl Pool {
    fn new(workers: usize) -> Self {
        Pool {
            state: Mutex::new(PoolState {
                queue: VecDeque::new(),
                idle: 0,
                done: false,
            }),
            cv: Condvar::new(),
            workers,
            idle_count: AtomicUsize::new(0),
            queue_len: AtomicUsize::new(0),
            epoch: AtomicU64::new(0),
            handoffs: AtomicU64::new(0),
        }
    }

    fn push(&self, pieces: Vec<SearchContext>) {
        if pieces.is_empty() {
            return;
        }
        let mut st = self.state.lock().unwrap();
        st.queue.extend(pieces);
        self.queue_len.store(st.queue.len(), Relaxed);
        drop(st);
        self.cv.notify_all();
    }

    /// Blocks until work arrives or the pool drains (queue empty with every
    /// worker idle — at that point no one can produce more).
    fn pull(&self) -> Option<SearchContext> {
        let mut st = self.state.lock().unwrap();
        st.idle += 1;
        self.idle_count.store(st.idle, Relaxed);
        loop {
            if let Some(c) = st.queue.pop_front() {
                self.queue_len.store(st.queue.len(), Relaxed);
                st.idle -= 1;
                self.idle_count.store(st.idle, Relaxed);
                return Some(c);
            }
            if st.done {
                return None;
            }
            if st.idle == self.workers {
                st.done = true;
                self.cv.notify_all();
                return None;
            }
            st = self.cv.wait(st).unwrap();
        }
    }
}

/// Queue-fed execution; `cfg` enables the context-splitting machinery.
fn pooled_run(
    g: &TemporalGraph,
    tree: &MgTree,
    delta: Time,
    mode: Mode,
    workers: usize,
    initial: &SearchContext,
    cfg: Option<&RuntimeConfig>,
) -> (Vec<(Harvest, f64)>, u64, u64) {
    let pool = Pool::new(workers);
    pool.push(split_context(initial, tree, workers * 8));
    let results: Vec<(Harvest, f64)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let pool = &pool;
                s.spawn(move || {
                    let mut h = Harvest::new(tree);
                    let mut busy = 0.0f64;
                    while let Some(ctx) = pool.pull() {
                        let my_epoch = pool.epoch.load(Relaxed);
                        let t0 = Instant::now();
                        let mut eng = Engine::resume(g, tree, delta, mode, &ctx);
                        match cfg {
                            None => eng.run_to_end(&mut h),
                            Some(cfg) => drive(pool, tree, &mut eng, cfg, my_epoch, &mut h),
                        }
                        busy += t0.elapsed().as_secs_f64() * 1e3;
                    }
                    (h, busy)
                })
            })
            .collect();
        handles.into_iter().map(|j| j.join().unwrap()).collect()
    });
    let st = pool.state.lock().unwrap();
    assert!(st.queue.is_empty(), "work queue not drained at shutdown");
    drop(st);
    (
        results,
        pool.epoch.load(Relaxed),
        pool.handoffs.load(Relaxed),
    )
}

/// Steps an engine under the context-splitting protocol: donate siblings to
/// starving workers, honor gap requests by splitting ourselves back into
/// the queue, and initiate gaps at epoch boundaries when enough workers
/// starve.  Returns when the engine finishes or its work has been requeued.
fn drive(
    pool: &Pool,
    tree: &MgTree,
    eng: &mut Engine<'_>,
    cfg: &RuntimeConfig,
    my_epoch: u64,
    harvest: &mut Harvest,
) {
    let mut since_inter: u64 = 0;
    loop {
        if eng.step(cfg.intra_interval, harvest) == StepOutcome::Finished {
            return;
        }
        since_inter += cfg.intra_interval;

        // Intra-epoch: one sibling per poll to starving workers.
        if pool.idle_count.load(Relaxed) > 0 && pool.queue_len.load(Relaxed) == 0 {
            if let Some(sib) = eng.sibling_handoff() {
                pool.handoffs.fetch_add(1, Relaxed);
                pool.push(vec![sib]);
            }
        }

        // Someone declared a gap: split ourselves into the queue and leave
        // this engine; the caller pulls fresh work like everyone else.
        let now = pool.epoch.load(Relaxed);
        if now != my_epoch {
            let pieces = split_context(&eng.dump(), tree, pool.workers.max(2));
            pool.push(pieces);
            return;
        }

        // Epoch boundary: initiate a gap when the idle fraction is reached
        // and the queue has nothing to offer them.
        if since_inter >= cfg.inter_interval {
            since_inter = 0;
            let idle = pool.idle_count.load(Relaxed);
            if idle > 0
                && pool.queue_len.load(Relaxed) == 0
                && idle as f64 >= cfg.idle_frac * pool.workers as f64
            {
                pool.epoch.fetch_add(1, Relaxed);
                let pieces = split_context(&eng.dump(), tree, pool.workers.max(2));
                pool.push(pieces);
                return;
            }
        }
    }
}
