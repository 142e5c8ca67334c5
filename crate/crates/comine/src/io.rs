//! Graph and query file loading, plus a binary cache of the built graph
//! index so large edge lists skip re-parsing and re-sorting.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use comine_core::graph::{parse_edge_list, ParseError, TemporalEdge, TemporalGraph, Time};
use comine_core::motif::{parse_query, Query, QueryError};
use thiserror::Error;

/// Failure to produce a graph from a path.
#[derive(Debug, Error)]
pub enum GraphLoadError {
    /// The file could not be read.
    #[error("cannot read graph `{path}`: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        #[source]
        source: io::Error,
    },
    /// The file is not a valid edge list.
    #[error("graph `{path}`: {source}")]
    Parse {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        #[source]
        source: ParseError,
    },
}

/// Failure to produce a query from a path.
#[derive(Debug, Error)]
pub enum QueryLoadError {
    /// The file could not be read.
    #[error("cannot read query `{path}`: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        #[source]
        source: io::Error,
    },
    /// The document is not a valid query.
    #[error("query `{path}`: {source}")]
    Parse {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        #[source]
        source: QueryError,
    },
    /// The query's window does not fit the graph's timestamp scale.
    #[error("delta {delta} cannot be applied to this graph: {msg}")]
    Delta {
        /// The window as written in the query.
        delta: String,
        /// What went wrong.
        msg: String,
    },
}

/// Loads a graph from a text edge list.
///
/// With `use_cache`, a sibling `<path>.cmtg` binary index is used when it is
/// at least as new as the source, and is (re)written after a text parse for
/// graphs without string vertex labels.  A stale, missing, or corrupt cache
/// silently falls back to the text path — caches are disposable.
pub fn load_graph(path: &Path, use_cache: bool) -> Result<TemporalGraph, GraphLoadError> {
    let cache = cache_path(path);
    if use_cache {
        if let Some(g) = try_read_cache(path, &cache) {
            return Ok(g);
        }
    }
    let text = fs::read_to_string(path).map_err(|source| GraphLoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let g = parse_edge_list(&text)
        .map_err(|source| GraphLoadError::Parse {
            path: path.to_path_buf(),
            source,
        })?
        .into_graph();
    if use_cache && g.labels().is_none() {
        let _ = write_cache(&cache, &g); // best effort
    }
    Ok(g)
}

/// Loads and parses a query document.
pub fn load_query(path: &Path) -> Result<Query, QueryLoadError> {
    let text = fs::read_to_string(path).map_err(|source| QueryLoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_query(&text).map_err(|source| QueryLoadError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Converts the query's exact decimal window into the graph's integer
/// timestamp scale.
pub fn resolve_delta(query: &Query, g: &TemporalGraph) -> Result<Time, QueryLoadError> {
    query
        .delta
        .to_scaled(g.scale())
        .map_err(|e| QueryLoadError::Delta {
            delta: query.delta.display(),
            msg: e.to_string(),
        })
}

/// `<graph path>.cmtg`.
pub fn cache_path(graph: &Path) -> PathBuf {
    let mut name = graph.file_name().unwrap_or_default().to_os_string();
    name.push(".cmtg");
    graph.with_file_name(name)
}

const CACHE_MAGIC: &[u8; 4] = b"CMTG";
const CACHE_VERSION: u32 = 1;

fn try_read_cache(source: &Path, cache: &Path) -> Option<TemporalGraph> {
    let (s_meta, c_meta) = (fs::metadata(source).ok()?, fs::metadata(cache).ok()?);
    if c_meta.modified().ok()? < s_meta.modified().ok()? {
        return None;
    }
    let bytes = fs::read(cache).ok()?;
    decode_cache(&bytes)
}

fn decode_cache(bytes: &[u8]) -> Option<TemporalGraph> {
    let mut off = 0usize;
    if bytes.get(..4)? != CACHE_MAGIC {
        return None;
    }
    off += 4;
    if read_u32(bytes, &mut off)? != CACHE_VERSION {
        return None;
    }
    let scale = read_u32(bytes, &mut off)?;
    let num_vertices = read_u64(bytes, &mut off)? as usize;
    let num_edges = read_u64(bytes, &mut off)? as usize;
    if bytes.len() != off + num_edges * 16 {
        return None;
    }
    let mut edges = Vec::with_capacity(num_edges);
    let mut prev_t = Time::MIN;
    for id in 0..num_edges {
        let src = read_u32(bytes, &mut off)?;
        let dst = read_u32(bytes, &mut off)?;
        let t = read_i64(bytes, &mut off)?;
        if (src as usize) >= num_vertices || (dst as usize) >= num_vertices || t < prev_t {
            return None;
        }
        prev_t = t;
        edges.push(TemporalEdge {
            id: id as u32,
            src,
            dst,
            t,
        });
    }
    Some(TemporalGraph::from_sorted_edges(
        num_vertices,
        edges,
        scale,
        None,
    ))
}

fn write_cache(cache: &Path, g: &TemporalGraph) -> io::Result<()> {
    let mut buf = Vec::with_capacity(24 + g.num_edges() * 16);
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(&g.scale().to_le_bytes());
    buf.extend_from_slice(&(g.num_vertices() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.num_edges() as u64).to_le_bytes());
    for e in g.edges() {
        buf.extend_from_slice(&e.src.to_le_bytes());
        buf.extend_from_slice(&e.dst.to_le_bytes());
        buf.extend_from_slice(&e.t.to_le_bytes());
    }
    let mut f = fs::File::create(cache)?;
    f.write_all(&buf)?;
    f.sync_all()
}

fn read_u32(b: &[u8], off: &mut usize) -> Option<u32> {
    let v = u32::from_le_bytes(b.get(*off..*off + 4)?.try_into().ok()?);
    *off += 4;
    Some(v)
}

fn read_u64(b: &[u8], off: &mut usize) -> Option<u64> {
    let v = u64::from_le_bytes(b.get(*off..*off + 8)?.try_into().ok()?);
    *off += 8;
    Some(v)
}

fn read_i64(b: &[u8], off: &mut usize) -> Option<i64> {
    let v = i64::from_le_bytes(b.get(*off..*off + 8)?.try_into().ok()?);
    *off += 8;
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trips_and_is_bitwise_equal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        fs::write(&path, "0 1 10\n1 2 5\n2 0 5\n").unwrap();
        let direct = load_graph(&path, false).unwrap();
        let written = load_graph(&path, true).unwrap();
        assert!(cache_path(&path).exists());
        let cached = load_graph(&path, true).unwrap();
        assert_eq!(direct.edges(), written.edges());
        assert_eq!(direct.edges(), cached.edges());
        assert_eq!(direct.num_vertices(), cached.num_vertices());
        assert_eq!(direct.scale(), cached.scale());
    }

    #[test]
    fn corrupt_cache_falls_back_to_text() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        fs::write(&path, "0 1 1\n").unwrap();
        load_graph(&path, true).unwrap();
        // Truncate the cache and keep it newer than the source.
        fs::write(cache_path(&path), b"CMTGgarbage").unwrap();
        let g = load_graph(&path, true).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn labeled_graphs_are_not_cached() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        fs::write(&path, "alice bob 1\nbob carol 2\n").unwrap();
        let g = load_graph(&path, true).unwrap();
        assert!(g.labels().is_some());
        assert!(!cache_path(&path).exists());
    }

    #[test]
    fn missing_graph_is_an_io_error() {
        let err = load_graph(Path::new("/definitely/not/here.txt"), false).unwrap_err();
        assert!(matches!(err, GraphLoadError::Io { .. }));
    }

    #[test]
    fn delta_resolution_respects_scale() {
        let dir = tempfile::tempdir().unwrap();
        let gpath = dir.path().join("g.txt");
        fs::write(&gpath, "#scale 1\n0 1 1.5\n").unwrap();
        let qpath = dir.path().join("q.txt");
        fs::write(
            &qpath,
            "graph g.txt\ndelta 2.5\nmotif m\nedge 0 1\nend\n",
        )
        .unwrap();
        let g = load_graph(&gpath, false).unwrap();
        let q = load_query(&qpath).unwrap();
        assert_eq!(resolve_delta(&q, &g).unwrap(), 25);

        // Too much precision for the graph's scale is an error, not rounding.
        fs::write(
            &qpath,
            "graph g.txt\ndelta 2.55\nmotif m\nedge 0 1\nend\n",
        )
        .unwrap();
        let q = load_query(&qpath).unwrap();
        assert!(matches!(
            resolve_delta(&q, &g),
            Err(QueryLoadError::Delta { .. })
        ));
    }
}
