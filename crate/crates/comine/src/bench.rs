//! Benchmark harness: sweeps window multipliers and worker counts, timing
//! co-mining against the sum of per-motif runs.

use crate::runtime::{run_parallel, RuntimeConfig};
use comine_core::graph::{TemporalGraph, Time};
use comine_core::mgtree::MgTree;
use comine_core::motif::{Balance, Mode};
use std::io::{self, Write};

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Window multipliers applied to the query's base window.
    pub delta_mults: Vec<f64>,
    /// Worker counts to sweep.
    pub workers: Vec<usize>,
    /// Timed repetitions per cell; wall times are summarized over these.
    pub repeat: usize,
    /// Balancing strategy for every run.
    pub balance: Balance,
    /// Runtime tuning knobs.
    pub config: RuntimeConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            delta_mults: default_delta_mults(),
            workers: vec![1],
            repeat: 1,
            balance: Balance::Dynamic,
            config: RuntimeConfig::default(),
        }
    }
}

/// The standard sweep: {1/4, 1/3, 1/2, 1, 2, 3, 4}.
pub fn default_delta_mults() -> Vec<f64> {
    vec![0.25, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 4.0]
}

/// One CSV row: a (multiplier, workers, strategy) cell of the sweep.
#[derive(Debug, Clone)]
pub struct BenchRow {
    /// Window multiplier for this cell.
    pub delta_mult: f64,
    /// Worker threads used.
    pub workers: usize,
    /// `individual` or `comine`.
    pub mode: &'static str,
    /// Median wall time over the repeats, in milliseconds.
    pub wall_ms: f64,
    /// Fastest repeat, in milliseconds.
    pub wall_ms_min: f64,
    /// Total candidate visits (identical across repeats).
    pub visits: u64,
    /// Median over repetitions of the per-repetition individual-sum wall
    /// over co-mining wall; 1.0 for individual rows.
    pub speedup: f64,
    /// Per-motif counts in group order (identical across strategies).
    pub counts: Vec<u64>,
}

/// Scales the base window by `mult`, rounding to the nearest time unit.
pub fn scale_delta(base: Time, mult: f64) -> Time {
    ((base as f64) * mult).round().max(0.0) as Time
}

fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    }
}

fn min_of(samples: &[f64]) -> f64 {
    samples.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Runs the full sweep.  Counts are exact, so within a cell the individual
/// and co-mining rows always agree; only the wall-time fields vary from run
/// to run.
pub fn run_bench(
    g: &TemporalGraph,
    tree: &MgTree,
    base_delta: Time,
    opts: &BenchOptions,
) -> Vec<BenchRow> {
    assert!(opts.repeat >= 1, "need at least one repetition");
    let singles: Vec<MgTree> = tree
        .motifs()
        .iter()
        .map(|m| MgTree::build(core::slice::from_ref(m)).expect("group motifs are canonical"))
        .collect();
    let mut rows = Vec::new();
    for &mult in &opts.delta_mults {
        let delta = scale_delta(base_delta, mult);
        for &w in &opts.workers {
            let mut ind_walls = Vec::with_capacity(opts.repeat);
            let mut co_walls = Vec::with_capacity(opts.repeat);
            let mut ratios = Vec::with_capacity(opts.repeat);
            let mut ind_visits = 0u64;
            let mut co_visits = 0u64;
            let mut ind_counts = Vec::new();
            let mut co_counts = Vec::new();
            // The two strategies are interleaved within each repetition and
            // compared pairwise, so slow stretches on a busy machine inflate
            // both sides of a ratio instead of biasing it.
            for rep in 0..opts.repeat {
                let mut ind_wall = 0.0;
                let mut visits = 0u64;
                let mut counts = Vec::with_capacity(singles.len());
                for single in &singles {
                    let (res, rs) =
                        run_parallel(g, single, delta, Mode::Count, w, opts.balance, &opts.config);
                    ind_wall += rs.wall_ms;
                    visits += rs.totals.visits;
                    counts.push(res.counts[0]);
                }
                ind_walls.push(ind_wall);

                let (res, rs) =
                    run_parallel(g, tree, delta, Mode::Count, w, opts.balance, &opts.config);
                co_walls.push(rs.wall_ms);
                // Sub-microsecond cells are floored so an empty sweep cannot
                // divide by zero.
                ratios.push(ind_wall.max(1e-3) / rs.wall_ms.max(1e-3));
                if rep == 0 {
                    ind_visits = visits;
                    ind_counts = counts;
                    co_visits = rs.totals.visits;
                    co_counts = res.counts;
                }
            }

            rows.push(BenchRow {
                delta_mult: mult,
                workers: w,
                mode: "individual",
                wall_ms: median(&ind_walls),
                wall_ms_min: min_of(&ind_walls),
                visits: ind_visits,
                speedup: 1.0,
                counts: ind_counts,
            });
            rows.push(BenchRow {
                delta_mult: mult,
                workers: w,
                mode: "comine",
                wall_ms: median(&co_walls),
                wall_ms_min: min_of(&co_walls),
                visits: co_visits,
                speedup: median(&ratios),
                counts: co_counts,
            });
        }
    }
    rows
}

/// Writes the sweep as CSV.  With `repeat > 1` the min and median wall
/// times get their own trailing columns.
pub fn write_bench_csv(mut w: impl Write, rows: &[BenchRow], repeat: usize) -> io::Result<()> {
    let spread = repeat > 1;
    write!(w, "delta_mult,workers,mode,wall_ms,visits,speedup,counts")?;
    if spread {
        write!(w, ",wall_ms_min,wall_ms_median")?;
    }
    writeln!(w)?;
    for r in rows {
        let counts: Vec<String> = r.counts.iter().map(|c| c.to_string()).collect();
        write!(
            w,
            "{:.4},{},{},{:.3},{},{:.4},{}",
            r.delta_mult,
            r.workers,
            r.mode,
            r.wall_ms,
            r.visits,
            r.speedup,
            counts.join(";")
        )?;
        if spread {
            write!(w, ",{:.3},{:.3}", r.wall_ms_min, r.wall_ms)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use comine_core::motif::Motif;

    fn motif(name: &str, edges: &[(u32, u32)]) -> Motif {
        Motif::new(name, edges.iter().copied()).unwrap()
    }

    fn small_bench() -> (TemporalGraph, MgTree) {
        let g = crate::gen::generate(crate::gen::GraphKind::Uniform, 12, 120, 42);
        let tree = MgTree::build(&[
            motif("path3", &[(0, 1), (1, 2), (2, 3)]),
            motif("path4", &[(0, 1), (1, 2), (2, 3), (3, 4)]),
        ])
        .unwrap();
        (g, tree)
    }

    #[test]
    fn scale_rounds_to_nearest_unit() {
        assert_eq!(scale_delta(100, 0.25), 25);
        assert_eq!(scale_delta(10, 1.0 / 3.0), 3);
        assert_eq!(scale_delta(10, 0.45), 5);
        assert_eq!(scale_delta(7, 4.0), 28);
        assert_eq!(scale_delta(0, 2.0), 0);
    }

    #[test]
    fn median_handles_odd_and_even_lengths() {
        assert_eq!(median(&[3.0]), 3.0);
        assert_eq!(median(&[4.0, 1.0, 9.0]), 4.0);
        assert_eq!(median(&[4.0, 1.0, 9.0, 5.0]), 4.5);
    }

    #[test]
    fn sweep_produces_two_rows_per_cell_with_matching_counts() {
        let (g, tree) = small_bench();
        let opts = BenchOptions {
            delta_mults: vec![0.5, 1.0, 2.0],
            workers: vec![1, 2],
            ..BenchOptions::default()
        };
        let rows = run_bench(&g, &tree, 40, &opts);
        assert_eq!(rows.len(), 3 * 2 * 2);
        for pair in rows.chunks(2) {
            let (ind, co) = (&pair[0], &pair[1]);
            assert_eq!(ind.mode, "individual");
            assert_eq!(co.mode, "comine");
            assert_eq!(ind.delta_mult, co.delta_mult);
            assert_eq!(ind.workers, co.workers);
            assert_eq!(ind.counts, co.counts, "strategies disagree on counts");
            assert_eq!(ind.speedup, 1.0);
            assert!(co.visits <= ind.visits, "shared prefix must not add work");
        }
    }

    #[test]
    fn counts_grow_with_the_multiplier() {
        let (g, tree) = small_bench();
        let opts = BenchOptions {
            delta_mults: vec![0.25, 1.0, 4.0],
            ..BenchOptions::default()
        };
        let rows = run_bench(&g, &tree, 60, &opts);
        let comine: Vec<&BenchRow> = rows.iter().filter(|r| r.mode == "comine").collect();
        for pair in comine.windows(2) {
            for (a, b) in pair[0].counts.iter().zip(&pair[1].counts) {
                assert!(a <= b, "widening the window lost matches");
            }
        }
    }

    #[test]
    fn csv_layout_matches_the_documented_schema() {
        let rows = vec![BenchRow {
            delta_mult: 1.0 / 3.0,
            workers: 2,
            mode: "comine",
            wall_ms: 4.25,
            wall_ms_min: 4.0,
            visits: 123,
            speedup: 1.5,
            counts: vec![7, 0],
        }];
        let mut out = Vec::new();
        write_bench_csv(&mut out, &rows, 1).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "delta_mult,workers,mode,wall_ms,visits,speedup,counts\n\
             0.3333,2,comine,4.250,123,1.5000,7;0\n"
        );

        let mut out = Vec::new();
        write_bench_csv(&mut out, &rows, 3).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(
            "delta_mult,workers,mode,wall_ms,visits,speedup,counts,wall_ms_min,wall_ms_median\n"
        ));
        assert!(text.contains(",4.000,4.250\n"));
    }
}
