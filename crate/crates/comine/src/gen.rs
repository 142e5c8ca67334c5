//! Deterministic synthetic temporal graphs and motif families, used by the
//! benchmark harness and the fuzzing verifier.

use comine_core::graph::{TemporalGraph, Time, VertexId};
use comine_core::motif::Motif;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a generated graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Endpoints and timestamps uniform at random.
    Uniform,
    /// One vertex concentrates most traffic inside a narrow time band, so
    /// the heavy candidates occupy a contiguous slice of edge ids — the
    /// adversarial case for static chunking.
    Hub,
    /// Two vertex sides; every edge crosses between them.
    Bipartite,
    /// Most timestamps collapse into a short burst window.
    Burst,
}

impl core::str::FromStr for GraphKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(GraphKind::Uniform),
            "hub" => Ok(GraphKind::Hub),
            "bipartite" => Ok(GraphKind::Bipartite),
            "burst" => Ok(GraphKind::Burst),
            other => Err(format!(
                "unknown graph kind `{other}` (expected uniform|hub|bipartite|burst)"
            )),
        }
    }
}

impl core::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            GraphKind::Uniform => "uniform",
            GraphKind::Hub => "hub",
            GraphKind::Bipartite => "bipartite",
            GraphKind::Burst => "burst",
        })
    }
}

/// Generates `edges` edges over `vertices` vertices, fully determined by
/// `seed`.  The time span grows with the edge count so densities stay
/// comparable across sizes.
pub fn generate(kind: GraphKind, vertices: u32, edges: usize, seed: u64) -> TemporalGraph {
    assert!(vertices >= 2, "need at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span: Time = (edges as Time).max(10) * 4;
    let triples = match kind {
        GraphKind::Uniform => uniform(&mut rng, vertices, edges, span),
        GraphKind::Hub => hub(&mut rng, vertices, edges, span),
        GraphKind::Bipartite => bipartite(&mut rng, vertices, edges, span),
        GraphKind::Burst => burst(&mut rng, vertices, edges, span),
    };
    TemporalGraph::with_vertices(vertices as usize, &triples)
}

fn distinct_pair(rng: &mut impl Rng, n: u32) -> (VertexId, VertexId) {
    loop {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            return (u, v);
        }
    }
}

fn uniform(
    rng: &mut impl Rng,
    n: u32,
    m: usize,
    span: Time,
) -> Vec<(VertexId, VertexId, Time)> {
    (0..m)
        .map(|_| {
            let (u, v) = distinct_pair(rng, n);
            (u, v, rng.random_range(0..=span))
        })
        .collect()
}

/// 60% uniform background, then two adjacent narrow bands early in the
/// span: 15% of edges flow into the hub, followed by 25% flowing out of
/// it.  Every in-edge's continuation scans the whole out-band, so nearly
/// all search work sits in ~5% of the edge-id space.
fn hub(rng: &mut impl Rng, n: u32, m: usize, span: Time) -> Vec<(VertexId, VertexId, Time)> {
    let hub: VertexId = 0;
    let triggers = m * 15 / 100;
    let payload = m * 25 / 100;
    let background = m - triggers - payload;
    let b0 = span / 10;
    let b1 = b0 + (span * 15 / 1000).max(1);
    let b2 = b1 + (span * 15 / 1000).max(1);
    let mut triples = Vec::with_capacity(m);
    for _ in 0..background {
        let (u, v) = distinct_pair(rng, n);
        triples.push((u, v, rng.random_range(0..=span)));
    }
    for _ in 0..triggers {
        let u = rng.random_range(1..n);
        triples.push((u, hub, rng.random_range(b0..b1)));
    }
    for _ in 0..payload {
        let v = rng.random_range(1..n);
        triples.push((hub, v, rng.random_range(b1..b2)));
    }
    triples
}

fn bipartite(
    rng: &mut impl Rng,
    n: u32,
    m: usize,
    span: Time,
) -> Vec<(VertexId, VertexId, Time)> {
    let half = (n / 2).max(1);
    (0..m)
        .map(|_| {
            let a = rng.random_range(0..half);
            let b = rng.random_range(half..n);
            let (u, v) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            (u, v, rng.random_range(0..=span))
        })
        .collect()
}

fn burst(rng: &mut impl Rng, n: u32, m: usize, span: Time) -> Vec<(VertexId, VertexId, Time)> {
    let b0 = span * 45 / 100;
    let b1 = b0 + (span / 10).max(1);
    (0..m)
        .map(|_| {
            let (u, v) = distinct_pair(rng, n);
            let t = if rng.random_bool(0.8) {
                rng.random_range(b0..=b1)
            } else {
                rng.random_range(0..=span)
            };
            (u, v, t)
        })
        .collect()
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

/// Random family of structurally distinct canonical motifs biased towards
/// shared prefixes.  May return fewer than `size` members when distinct
/// structures run out.
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

#[cfg(test)]
mod tests {
    use super::*;
    use comine_core::graph::detect_bipartite;

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        for kind in [
            GraphKind::Uniform,
            GraphKind::Hub,
            GraphKind::Bipartite,
            GraphKind::Burst,
        ] {
            let a = generate(kind, 50, 400, 7);
            let b = generate(kind, 50, 400, 7);
            let c = generate(kind, 50, 400, 8);
            assert_eq!(a.edges(), b.edges(), "{kind}");
            assert_ne!(a.edges(), c.edges(), "{kind}");
            assert_eq!(a.num_edges(), 400);
        }
    }

    #[test]
    fn bipartite_graphs_two_color() {
        let g = generate(GraphKind::Bipartite, 40, 500, 3);
        let p = detect_bipartite(&g).expect("generated graph must be bipartite");
        for e in g.edges() {
            assert_ne!(p.side[e.src as usize], p.side[e.dst as usize]);
        }
    }

    #[test]
    fn hub_graph_concentrates_hub_traffic_in_a_band() {
        let g = generate(GraphKind::Hub, 60, 2000, 11);
        let hub_edges: Vec<_> = g
            .edges()
            .iter()
            .filter(|e| e.src == 0 || e.dst == 0)
            .collect();
        assert!(hub_edges.len() >= 2000 * 35 / 100, "hub share too small");
        let (lo, hi) = hub_edges
            .iter()
            .fold((Time::MAX, Time::MIN), |(lo, hi), e| {
                (lo.min(e.t), hi.max(e.t))
            });
        // The deliberate bands hold almost all hub traffic; a few uniform
        // background edges may also touch the hub outside them.
        let inside = hub_edges
            .iter()
            .filter(|e| e.t >= g.time_span() / 10 && e.t <= g.time_span() / 10 + g.time_span() * 3 / 100 + 2)
            .count();
        assert!(inside * 10 >= hub_edges.len() * 9, "band not dominant");
        assert!(lo < hi);
    }

    #[test]
    fn burst_graph_clusters_timestamps() {
        let g = generate(GraphKind::Burst, 30, 1000, 5);
        let span = g.time_span().max(1);
        let b0 = span * 4 / 10;
        let b1 = span * 6 / 10;
        let inside = g.edges().iter().filter(|e| e.t >= b0 && e.t <= b1).count();
        assert!(inside >= 700, "burst window holds {inside}/1000");
    }

    #[test]
    fn families_are_canonical_and_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let fam = random_family(&mut rng, 4, 5);
            assert!(!fam.is_empty());
            for m in &fam {
                assert!(m.is_canonical());
            }
            for i in 0..fam.len() {
                for j in i + 1..fam.len() {
                    assert!(!fam[i].same_structure(&fam[j]));
                }
            }
        }
    }
}
