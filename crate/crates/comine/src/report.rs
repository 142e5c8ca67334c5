//! Output writers for mining runs: a counts TSV, a machine-readable JSON
//! record, and optional per-motif match listings.

use crate::runtime::RunStats;
use comine_core::graph::EdgeId;
use comine_core::mgtree::DecisionRecord;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// One motif's result inside [`OutputRecord`].
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MotifCount {
    /// Motif name from the query.
    pub name: String,
    /// Number of matches in the graph under the window.
    pub count: u64,
    /// Where the full match listing was written, if enumeration was on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_path: Option<PathBuf>,
}

/// Everything a run produced, in a stable field order for `result.json`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OutputRecord {
    /// Graph file the run used.
    pub graph: PathBuf,
    /// Vertex count of that graph.
    pub num_vertices: usize,
    /// Edge count of that graph.
    pub num_edges: usize,
    /// Resolved window in scaled integer time units.
    pub delta: i64,
    /// `count` or `enumerate`.
    pub mode: String,
    /// How the motifs were grouped and why.
    pub decision: DecisionRecord,
    /// Per-motif results in query order.
    pub motifs: Vec<MotifCount>,
    /// Execution statistics.
    pub run: RunStats,
}

/// Writes `name<TAB>count` lines in query order.
pub fn write_counts_tsv(mut w: impl Write, motifs: &[MotifCount]) -> io::Result<()> {
    for m in motifs {
        writeln!(w, "{}\t{}", m.name, m.count)?;
    }
    Ok(())
}

/// Writes the JSON record, pretty-printed, with a trailing newline.
pub fn write_result_json(mut w: impl Write, record: &OutputRecord) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, record)?;
    writeln!(w)
}

/// Writes one `name: e1,e2,...` line per match, in emission order.
pub fn write_matches(mut w: impl Write, name: &str, matches: &[Vec<EdgeId>]) -> io::Result<()> {
    for m in matches {
        let ids: Vec<String> = m.iter().map(|e| e.to_string()).collect();
        writeln!(w, "{}: {}", name, ids.join(","))?;
    }
    Ok(())
}

/// Filename for a motif's match listing, with the name made filesystem-safe.
pub fn matches_filename(dir: &Path, name: &str) -> PathBuf {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    dir.join(format!("matches_{safe}.txt"))
}
