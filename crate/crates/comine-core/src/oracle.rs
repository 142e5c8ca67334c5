//! Brute-force reference implementation, used as ground truth in
//! differential tests.
//!
//! This module implements the match *definition* directly and shares no
//! traversal machinery with the miner: no book-keeping context, no adjacency
//! index, no candidate ranges.  It enumerates strictly increasing edge-id
//! tuples (pruned only by the δ window, which the time-sorted edge array
//! makes a simple `break`), then checks each complete tuple for a consistent
//! injective vertex assignment.  Deliberately simple and slow.

use alloc::vec::Vec;
use thiserror::Error;

use crate::graph::{EdgeId, TemporalGraph, Time, VertexId};
use crate::motif::Motif;

/// Input-size guard: refuse combinations where `C(|E|, m)` enumeration could
/// silently take hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("oracle refuses {edges} edges with a {motif_edges}-edge motif; allowed: ≤ {MAX_EDGES} edges or ≤ {MAX_MOTIF_EDGES} motif edges")]
pub struct SizeGuard {
    /// Graph edge count.
    pub edges: usize,
    /// Motif edge count.
    pub motif_edges: usize,
}

/// Largest graph accepted together with a motif above [`MAX_MOTIF_EDGES`].
pub const MAX_EDGES: usize = 500;
/// Largest motif accepted together with a graph above [`MAX_EDGES`].
pub const MAX_MOTIF_EDGES: usize = 3;

fn guard(g: &TemporalGraph, m: &Motif) -> Result<(), SizeGuard> {
    if g.num_edges() > MAX_EDGES && m.edge_count() > MAX_MOTIF_EDGES {
        Err(SizeGuard {
            edges: g.num_edges(),
            motif_edges: m.edge_count(),
        })
    } else {
        Ok(())
    }
}

/// Enumerates every match of `m` by exhaustive tuple search; output is
/// sorted lexicographically by edge ids (the natural enumeration order).
pub fn brute_force_enumerate(
    g: &TemporalGraph,
    m: &Motif,
    delta: Time,
) -> Result<Vec<Vec<EdgeId>>, SizeGuard> {
    guard(g, m)?;
    Ok(brute_force_enumerate_unchecked(g, m, delta))
}

/// Number of matches of `m`.
pub fn brute_force_count(g: &TemporalGraph, m: &Motif, delta: Time) -> Result<u64, SizeGuard> {
    Ok(brute_force_enumerate(g, m, delta)?.len() as u64)
}

/// As [`brute_force_enumerate`] without the size guard — the caller accepts
/// the runtime.
pub fn brute_force_enumerate_unchecked(
    g: &TemporalGraph,
    m: &Motif,
    delta: Time,
) -> Vec<Vec<EdgeId>> {
    let mut out = Vec::new();
    let mut tuple: Vec<EdgeId> = Vec::with_capacity(m.edge_count());
    let mut assignment = alloc::vec![VertexId::MAX; m.num_vertices() as usize];
    tuples(g, m, delta, 0, &mut tuple, &mut assignment, &mut out);
    out
}

/// As [`brute_force_count`] without the size guard.
pub fn brute_force_count_unchecked(g: &TemporalGraph, m: &Motif, delta: Time) -> u64 {
    brute_force_enumerate_unchecked(g, m, delta).len() as u64
}

fn tuples(
    g: &TemporalGraph,
    m: &Motif,
    delta: Time,
    start: usize,
    tuple: &mut Vec<EdgeId>,
    assignment: &mut [VertexId],
    out: &mut Vec<Vec<EdgeId>>,
) {
    if tuple.len() == m.edge_count() {
        if assigns(g, m, tuple, assignment) {
            out.push(tuple.clone());
        }
        return;
    }
    let bound = tuple
        .first()
        .map(|&first| g.edge(first).t.saturating_add(delta));
    for i in start..g.num_edges() {
        if let Some(b) = bound {
            // Edges are time-sorted, so everything past the window is out.
            if g.edge(i as EdgeId).t > b {
                break;
            }
        }
        tuple.push(i as EdgeId);
        tuples(g, m, delta, i + 1, tuple, assignment, out);
        tuple.pop();
    }
}

/// True iff some injective motif-vertex → graph-vertex assignment maps each
/// motif edge onto the corresponding tuple edge.  Since each motif edge pins
/// both its endpoints, the assignment is forced edge by edge; only
/// consistency and injectivity can fail.
fn assigns(g: &TemporalGraph, m: &Motif, tuple: &[EdgeId], assignment: &mut [VertexId]) -> bool {
    assignment.fill(VertexId::MAX);
    for (k, &eid) in tuple.iter().enumerate() {
        let me = m.edges()[k];
        let e = g.edge(eid);
        for (mv, gv) in [(me.src, e.src), (me.dst, e.dst)] {
            let slot = assignment[mv as usize];
            if slot == VertexId::MAX {
                // Injectivity: no other motif vertex may already hold gv.
                if assignment.iter().any(|&a| a == gv) {
                    return false;
                }
                assignment[mv as usize] = gv;
            } else if slot != gv {
                return false;
            }
        }
    }
    true
}
