//! Exact δ-temporal motif mining over timestamped directed graphs.
//!
//! A *temporal motif* is an ordered sequence of directed pattern edges.  A
//! match maps the pattern edges onto distinct graph edges so that
//!
//! * graph-edge timestamps strictly increase along the pattern order,
//! * the last timestamp is within `δ` of the first, and
//! * the vertex mapping is injective (isomorphism semantics).
//!
//! The crate provides:
//!
//! * [`graph`] — timestamped edge lists, parsing, and a time-sorted CSR index
//!   that serves contiguous candidate ranges during search;
//! * [`motif`] — motif and multi-motif query definitions, canonical vertex
//!   numbering, and the query-document parser;
//! * [`mgtree`] — the motif-group tree, which overlays a group of motifs into
//!   a prefix tree of shared edge sequences, plus the similarity metric and
//!   the co-mining decision heuristic;
//! * [`miner`] — the backtracking matcher: a per-motif baseline and a
//!   tree-driven co-miner that mines a whole group in one traversal;
//! * [`plan`] — a per-depth specialized traversal plan that removes dynamic
//!   mapped-ness checks from the hot loop;
//! * [`oracle`] — a deliberately naive brute-force enumerator used as ground
//!   truth in differential tests.
//!
//! The crate is `no_std` (with `alloc`) so the algorithms can be embedded
//! anywhere; file formats, threads, and the CLI live in the companion
//! `comine` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod graph;
pub mod mgtree;
pub mod miner;
pub mod motif;
pub mod oracle;
pub mod plan;

pub use graph::{EdgeId, TemporalEdge, TemporalGraph, Time, VertexId};
pub use mgtree::MgTree;
pub use miner::{MatchResult, MiningStats};
pub use motif::{Motif, Query};
