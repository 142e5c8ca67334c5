//! Differential verification: the miner against the exhaustive oracle on
//! given or fuzzed instances, with greedy witness shrinking on failure.

use crate::gen::{self, GraphKind};
use comine_core::graph::{TemporalGraph, Time};
use comine_core::mgtree::MgTree;
use comine_core::miner::{co_mine, mine_single};
use comine_core::motif::{Mode, Motif};
use comine_core::oracle::{self, SizeGuard};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One disagreement between two counting strategies.
#[derive(Debug, Clone)]
pub struct Mismatch {
    /// Name of the first motif whose counts diverged.
    pub motif: String,
    /// Count from the reference side (oracle, or per-motif runs).
    pub expected: u64,
    /// Count from the side under test.
    pub actual: u64,
    /// Which comparison failed.
    pub stage: &'static str,
}

impl core::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}: motif {} expected {} got {}",
            self.stage, self.motif, self.expected, self.actual
        )
    }
}

/// A failing instance reduced until every edge matters.
#[derive(Debug, Clone)]
pub struct Witness {
    /// The shrunk graph.
    pub graph: TemporalGraph,
    /// The motif group it fails on.
    pub motifs: Vec<Motif>,
    /// The window it fails under.
    pub delta: Time,
}

/// Outcome of a verification run.
#[derive(Debug, Default)]
pub struct VerifyReport {
    /// Instances checked.
    pub instances: usize,
    /// All disagreements found (empty means verified).
    pub mismatches: Vec<Mismatch>,
    /// Minimal failing graph for the first mismatch, if any.
    pub witness: Option<Witness>,
}

impl VerifyReport {
    /// True when every comparison agreed.
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks one instance two ways: each motif's miner count against the
/// exhaustive oracle, then the co-mining counts against the per-motif runs.
/// `allow_large` skips the oracle's input-size guard.
pub fn verify_instance(
    g: &TemporalGraph,
    motifs: &[Motif],
    delta: Time,
    allow_large: bool,
) -> Result<Vec<Mismatch>, SizeGuard> {
    let mut mismatches = Vec::new();
    let mut single_counts = Vec::with_capacity(motifs.len());
    for m in motifs {
        let expected = if allow_large {
            oracle::brute_force_count_unchecked(g, m, delta)
        } else {
            oracle::brute_force_count(g, m, delta)?
        };
        let (res, _) = mine_single(g, m, delta, Mode::Count);
        let actual = res.counts[0];
        single_counts.push(actual);
        if actual != expected {
            mismatches.push(Mismatch {
                motif: m.name().to_string(),
                expected,
                actual,
                stage: "oracle vs miner",
            });
        }
    }
    if let Ok(tree) = MgTree::build(motifs) {
        let (res, _) = co_mine(g, &tree, delta, Mode::Count);
        for (i, m) in motifs.iter().enumerate() {
            if res.counts[i] != single_counts[i] {
                mismatches.push(Mismatch {
                    motif: m.name().to_string(),
                    expected: single_counts[i],
                    actual: res.counts[i],
                    stage: "co-mining vs individual",
                });
            }
        }
    }
    Ok(mismatches)
}

/// Greedy 1-minimal shrink: repeatedly drops any single edge whose removal
/// keeps `still_failing` true, until no single removal does.
pub fn shrink_graph(
    g: &TemporalGraph,
    still_failing: impl Fn(&TemporalGraph) -> bool,
) -> TemporalGraph {
    let n = g.num_vertices();
    let mut triples: Vec<(u32, u32, Time)> =
        g.edges().iter().map(|e| (e.src, e.dst, e.t)).collect();
    let mut progress = true;
    while progress {
        progress = false;
        let mut i = 0;
        while i < triples.len() {
            let removed = triples.remove(i);
            let candidate = TemporalGraph::with_vertices(n, &triples);
            if still_failing(&candidate) {
                progress = true;
            } else {
                triples.insert(i, removed);
                i += 1;
            }
        }
    }
    TemporalGraph::with_vertices(n, &triples)
}

/// Verifies `n` random instances derived from `seed`.  On the first
/// mismatch the failing graph is shrunk into a witness; later instances are
/// still checked so the report covers everything.
pub fn fuzz(n: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [
        GraphKind::Uniform,
        GraphKind::Burst,
        GraphKind::Bipartite,
        GraphKind::Hub,
    ];
    let mut report = VerifyReport::default();
    for i in 0..n {
        let kind = kinds[i % kinds.len()];
        let vertices = rng.random_range(4..=20);
        let edges = rng.random_range(12..=150);
        let g = gen::generate(kind, vertices, edges, rng.random());
        let family_size = rng.random_range(1..=4);
        let motifs = gen::random_family(&mut rng, family_size, 4);
        if motifs.is_empty() {
            continue;
        }
        let span = g.time_span();
        let delta = *[span / 20 + 1, span / 6 + 1, span / 2, span]
            .get(rng.random_range(0..4))
            .unwrap();
        let mismatches =
            verify_instance(&g, &motifs, delta, false).expect("fuzz sizes stay under the guard");
        if !mismatches.is_empty() && report.witness.is_none() {
            let ms = motifs.clone();
            let shrunk = shrink_graph(&g, |h| {
                verify_instance(h, &ms, delta, true)
                    .map(|mm| !mm.is_empty())
                    .unwrap_or(false)
            });
            report.witness = Some(Witness {
                graph: shrunk,
                motifs,
                delta,
            });
        }
        report.mismatches.extend(mismatches);
        report.instances += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuzzing_a_correct_miner_finds_nothing() {
        let report = fuzz(30, 0xF00D);
        assert!(report.instances >= 25);
        assert!(report.ok(), "unexpected mismatches: {:?}", report.mismatches);
        assert!(report.witness.is_none());
    }

    #[test]
    fn guard_rejects_oversized_instances() {
        let g = gen::generate(GraphKind::Uniform, 40, 600, 1);
        let m = Motif::new("m4", [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let err = verify_instance(&g, core::slice::from_ref(&m), 50, false).unwrap_err();
        assert_eq!(err.edges, 600);
        assert!(verify_instance(&g, core::slice::from_ref(&m), 50, true).is_ok());
    }

    #[test]
    fn shrinking_removes_every_irrelevant_edge() {
        // Predicate: the graph still matches the 2-path motif at least once
        // within a window of 10.  Triples 0..2 form the only match; the
        // rest is noise the shrinker must discard.
        let m = Motif::new("p2", [(0, 1), (1, 2)]).unwrap();
        let g = TemporalGraph::with_vertices(
            6,
            &[
                (0, 1, 5),
                (1, 2, 9),
                (4, 5, 100),
                (5, 3, 400),
                (2, 0, 800),
                (3, 4, 900),
            ],
        );
        let fails = |h: &TemporalGraph| oracle::brute_force_count_unchecked(h, &m, 10) > 0;
        assert!(fails(&g));
        let shrunk = shrink_graph(&g, fails);
        assert_eq!(shrunk.num_edges(), 2);
        let ts: Vec<Time> = shrunk.edges().iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![5, 9]);
        // 1-minimality: removing either remaining edge kills the match.
        for skip in 0..2 {
            let triples: Vec<_> = shrunk
                .edges()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, e)| (e.src, e.dst, e.t))
                .collect();
            assert!(!fails(&TemporalGraph::with_vertices(6, &triples)));
        }
    }

    #[test]
    fn planted_disagreement_produces_a_minimal_witness() {
        // Simulate a buggy miner by shrinking against a predicate that
        // compares the real oracle with a deliberately broken count.
        let m = Motif::new("p2", [(0, 1), (1, 2)]).unwrap();
        let g = TemporalGraph::with_vertices(
            5,
            &[(0, 1, 0), (1, 2, 3), (3, 4, 50), (4, 3, 60), (2, 3, 70)],
        );
        let buggy = |h: &TemporalGraph| {
            let real = oracle::brute_force_count_unchecked(h, &m, 5);
            let broken = real.saturating_sub(u64::from(real > 0)); // drops one match
            real != broken
        };
        let witness = shrink_graph(&g, buggy);
        assert_eq!(witness.num_edges(), 2, "witness keeps only the match");
    }
}
