//! Deterministic random-instance generators shared by the integration
//! suites.  Everything is driven by a caller-supplied RNG so any failure
//! reproduces from the printed seed alone.

// Each suite uses its own subset of these helpers.
#![allow(dead_code)]

use comine_core::graph::{TemporalGraph, Time};
use comine_core::motif::Motif;
use rand::Rng;

/// Random temporal graph with up to `max_edges` edges over at most
/// `max_vertices` vertices.  Timestamps collide freely and a small share of
/// self-loops is thrown in deliberately — matchers must skip those.
pub fn random_graph(rng: &mut impl Rng, max_vertices: u32, max_edges: usize) -> TemporalGraph {
    let n = rng.random_range(3..=max_vertices.max(3));
    let m = rng.random_range(0..=max_edges);
    let spreads: [Time; 4] = [5, 20, 200, 5_000];
    let t_max = spreads[rng.random_range(0..spreads.len())];
    let mut triples = Vec::with_capacity(m);
    for _ in 0..m {
        let src = rng.random_range(0..n);
        let dst = if rng.random_bool(0.04) {
            src
        } else {
            rng.random_range(0..n)
        };
        triples.push((src, dst, rng.random_range(0..=t_max)));
    }
    TemporalGraph::with_vertices(n as usize, &triples)
}

/// Appends `extra` random edges to a canonical edge list while keeping the
/// first-appearance numbering discipline, so the result stays canonical.
fn extend_canonical(rng: &mut impl Rng, edges: &mut Vec<(u32, u32)>, extra: usize) {
    let mut next = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    for _ in 0..extra {
        if edges.is_empty() {
            edges.push((0, 1));
            next = 2;
            continue;
        }
        let src = if rng.random_bool(0.8) {
            rng.random_range(0..next)
        } else {
            next
        };
        // A fresh destination must take the next number after a fresh source.
        let dst_pool = next + u32::from(src == next);
        let dst = loop {
            let cand = if rng.random_bool(0.6) {
                rng.random_range(0..dst_pool)
            } else {
                dst_pool
            };
            if cand != src {
                break cand;
            }
        };
        next = next.max(src.max(dst) + 1);
        edges.push((src, dst));
    }
}

/// Random canonical motif with exactly `len` edges.
pub fn random_motif(rng: &mut impl Rng, name: &str, len: usize) -> Motif {
    let mut edges = Vec::new();
    extend_canonical(rng, &mut edges, len);
    let m = Motif::new(name, edges).unwrap();
    debug_assert!(m.is_canonical());
    m
}

/// Random family of structurally distinct canonical motifs biased towards
/// shared prefixes — the interesting regime for group mining.  May return
/// fewer than `size` members when distinct structures run out.
pub fn random_family(rng: &mut impl Rng, size: usize, max_len: usize) -> Vec<Motif> {
    let base_len = rng.random_range(1..=max_len);
    let mut base = Vec::new();
    extend_canonical(rng, &mut base, base_len);
    let mut family: Vec<Motif> = Vec::new();
    'members: for i in 0..size {
        for _attempt in 0..24 {
            let share = rng
                .random_range(0..=base.len())
                .max(rng.random_range(0..=base.len()));
            let len = rng.random_range(share.max(1)..=max_len.max(share));
            let mut edges = base[..share].to_vec();
            extend_canonical(rng, &mut edges, len - share);
            let m = Motif::new(format!("m{i}"), edges).unwrap();
            if family.iter().all(|f| !f.same_structure(&m)) {
                family.push(m);
                continue 'members;
            }
        }
    }
    family
}

/// Window width biased towards the small end of the graph's span, where
/// pruning actually matters.
pub fn random_delta(rng: &mut impl Rng, g: &TemporalGraph) -> Time {
    let span = g.time_span().max(1);
    match rng.random_range(0..6) {
        0 => 0,
        1 => 1,
        2 => span / 8 + 1,
        3 => span / 3 + 1,
        4 => span + 1,
        _ => rng.random_range(0..=span),
    }
}
