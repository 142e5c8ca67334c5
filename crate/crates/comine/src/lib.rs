//! Execution layer for the temporal motif co-mining engine.
//!
//! [`comine_core`] holds the algorithmic substance — graph index, motif
//! groups, group trees, and the single-threaded miners.  This crate adds
//! everything that needs an operating system:
//!
//! - [`runtime`] — parallel execution with resumable search contexts,
//!   work-queue balancing, sibling handoff, and epoch-based rebalancing;
//! - [`io`] — graph/query file loading and a binary index cache;
//! - [`gen`] — deterministic synthetic graph generators;
//! - [`report`] — result records and file outputs (TSV/JSON/match lists);
//! - [`bench`] — window-scaling and worker-scaling sweeps;
//! - [`verify`] — differential checking against the exhaustive reference,
//!   with fuzzing and witness shrinking;
//! - [`cli`] — the `comine` command-line front end.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod bench;
pub mod cli;
pub mod gen;
pub mod io;
pub mod report;
pub mod runtime;
pub mod verify;
