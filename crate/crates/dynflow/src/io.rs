//! File formats: DIMACS max-flow graphs, a plain edge-list alternative, and
//! update-batch files. Vertices are 1-indexed on disk and 0-indexed in
//! memory; the translation happens here and nowhere else.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::dynamic_pr::{BatchKind, UpdateBatch, UpdateEntry};
use crate::error::{Error, Result};
use crate::graph::BiCsrGraph;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Read a graph file, sniffing the format: lines starting with `c`, `p` or
/// `n` mean DIMACS max; otherwise the plain `<n> <m> <s> <t>` header format.
pub fn read_graph(path: impl AsRef<Path>) -> Result<BiCsrGraph> {
    let path = path.as_ref();
    let first = BufReader::new(File::open(path)?)
        .lines()
        .map_while(|l| l.ok())
        .find(|l| !l.trim().is_empty());
    match first {
        Some(line) if matches!(line.trim().chars().next(), Some('c' | 'p' | 'n' | 'a')) => {
            read_dimacs(path)
        }
        Some(_) => read_plain(path),
        None => Err(parse_err(path, 0, "empty graph file")),
    }
}

/// DIMACS max format: `c` comments, `p max <n> <m>`, `n <id> s|t` node
/// designators, `a <u> <v> <cap>` arcs; 1-indexed.
pub fn read_dimacs(path: impl AsRef<Path>) -> Result<BiCsrGraph> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut source: Option<u32> = None;
    let mut sink: Option<u32> = None;
    let mut edges: Vec<(u32, u32, u32)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None | Some("c") => continue,
            Some("p") => {
                if tokens.next() != Some("max") {
                    return Err(parse_err(path, lineno, "problem line must be `p max n m`"));
                }
                n = Some(parse_token(&mut tokens, path, lineno, "vertex count")?);
                m = Some(parse_token(&mut tokens, path, lineno, "edge count")?);
            }
            Some("n") => {
                let id: u64 = parse_token(&mut tokens, path, lineno, "node id")?;
                let id = to_internal(id, n, path, lineno)?;
                match tokens.next() {
                    Some("s") => source = Some(id),
                    Some("t") => sink = Some(id),
                    other => {
                        return Err(parse_err(
                            path,
                            lineno,
                            format!("node designator must be s or t, got {other:?}"),
                        ))
                    }
                }
            }
            Some("a") => {
                let u: u64 = parse_token(&mut tokens, path, lineno, "tail")?;
                let v: u64 = parse_token(&mut tokens, path, lineno, "head")?;
                let cap: u64 = parse_token(&mut tokens, path, lineno, "capacity")?;
                if cap > u32::MAX as u64 {
                    return Err(parse_err(path, lineno, format!("capacity {cap} too large")));
                }
                edges.push((
                    to_internal(u, n, path, lineno)?,
                    to_internal(v, n, path, lineno)?,
                    cap as u32,
                ));
            }
            Some(other) => {
                return Err(parse_err(path, lineno, format!("unknown line type `{other}`")));
            }
        }
    }

    let n = n.ok_or_else(|| parse_err(path, 0, "missing problem line"))?;
    let m = m.unwrap_or(edges.len());
    if m != edges.len() {
        return Err(parse_err(
            path,
            0,
            format!("problem line declares {m} arcs but file has {}", edges.len()),
        ));
    }
    let source = source.ok_or_else(|| parse_err(path, 0, "missing source designator"))?;
    let sink = sink.ok_or_else(|| parse_err(path, 0, "missing sink designator"))?;
    BiCsrGraph::build(&edges, n, source, sink)
}

/// Plain format: first line `<n> <m> <s> <t>`, then `m` lines `<u> <v> <cap>`;
/// 1-indexed.
pub fn read_plain(path: impl AsRef<Path>) -> Result<BiCsrGraph> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty graph file"))?;
    let header = header?;
    let mut tokens = header.split_whitespace();
    let n: usize = parse_token(&mut tokens, path, lineno + 1, "vertex count")?;
    let m: usize = parse_token(&mut tokens, path, lineno + 1, "edge count")?;
    let s: u64 = parse_token(&mut tokens, path, lineno + 1, "source")?;
    let t: u64 = parse_token(&mut tokens, path, lineno + 1, "sink")?;

    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let u: u64 = parse_token(&mut tokens, path, lineno, "tail")?;
        let v: u64 = parse_token(&mut tokens, path, lineno, "head")?;
        let cap: u64 = parse_token(&mut tokens, path, lineno, "capacity")?;
        edges.push((
            to_internal(u, Some(n), path, lineno)?,
            to_internal(v, Some(n), path, lineno)?,
            cap.min(u32::MAX as u64) as u32,
        ));
    }
    if edges.len() != m {
        return Err(parse_err(
            path,
            0,
            format!("header declares {m} edges but file has {}", edges.len()),
        ));
    }
    BiCsrGraph::build(
        &edges,
        n,
        to_internal(s, Some(n), path, 1)?,
        to_internal(t, Some(n), path, 1)?,
    )
}

/// Write a graph in DIMACS max format. Only positive-capacity slots are
/// emitted; zero-capacity reverse fillers are reconstructed on load.
pub fn write_dimacs(path: impl AsRef<Path>, graph: &BiCsrGraph) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let arcs: Vec<u32> =
        (0..graph.slot_count() as u32).filter(|&i| graph.capacity(i) > 0).collect();
    writeln!(w, "c directed max-flow instance")?;
    writeln!(w, "p max {} {}", graph.vertex_count(), arcs.len())?;
    writeln!(w, "n {} s", graph.source() + 1)?;
    writeln!(w, "n {} t", graph.sink() + 1)?;
    for slot in arcs {
        writeln!(
            w,
            "a {} {} {}",
            graph.slot_owner(slot) + 1,
            graph.target(slot) + 1,
            graph.capacity(slot)
        )?;
    }
    Ok(())
}

/// Batch file: header `u <k> <kind>` with kind in `{inc, dec, mix}`, then `k`
/// lines `<u> <v> <new_cap>`; 1-indexed.
pub fn read_batch(path: impl AsRef<Path>) -> Result<UpdateBatch> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

    let (idx, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty batch file"))?;
    let header = header?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("u") {
        return Err(parse_err(path, idx + 1, "batch header must start with `u`"));
    }
    let k: usize = parse_token(&mut tokens, path, idx + 1, "entry count")?;
    let kind: BatchKind = tokens
        .next()
        .ok_or_else(|| parse_err(path, idx + 1, "missing batch kind"))?
        .parse()
        .map_err(|e: String| parse_err(path, idx + 1, e))?;

    let mut entries = Vec::with_capacity(k);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let u: u64 = parse_token(&mut tokens, path, lineno, "tail")?;
        let v: u64 = parse_token(&mut tokens, path, lineno, "head")?;
        let cap: u64 = parse_token(&mut tokens, path, lineno, "new capacity")?;
        if u == 0 || v == 0 {
            return Err(parse_err(path, lineno, "vertex ids are 1-indexed"));
        }
        if cap > u32::MAX as u64 {
            return Err(parse_err(path, lineno, format!("capacity {cap} too large")));
        }
        entries.push(UpdateEntry {
            from: (u - 1) as u32,
            to: (v - 1) as u32,
            new_capacity: cap as u32,
        });
    }
    if entries.len() != k {
        return Err(parse_err(
            path,
            0,
            format!("header declares {k} entries but file has {}", entries.len()),
        ));
    }
    Ok(UpdateBatch::new(kind, entries))
}

/// Write a batch in the `u <k> <kind>` format.
pub fn write_batch(path: impl AsRef<Path>, batch: &UpdateBatch) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "u {} {}", batch.len(), batch.kind)?;
    for e in &batch.entries {
        writeln!(w, "{} {} {}", e.from + 1, e.to + 1, e.new_capacity)?;
    }
    Ok(())
}

fn parse_token<T: std::str::FromStr>(
    tokens: &mut std::str::SplitWhitespace<'_>,
    path: &Path,
    lineno: usize,
    what: &str,
) -> Result<T> {
    tokens
        .next()
        .ok_or_else(|| parse_err(path, lineno, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(path, lineno, format!("malformed {what}")))
}

fn to_internal(id: u64, n: Option<usize>, path: &Path, lineno: usize) -> Result<u32> {
    if id == 0 {
        return Err(parse_err(path, lineno, "vertex ids are 1-indexed"));
    }
    if let Some(n) = n {
        if id > n as u64 {
            return Err(parse_err(
                path,
                lineno,
                format!("vertex id {id} exceeds declared count {n}"),
            ));
        }
    }
    Ok((id - 1) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_maxflow;
    use crate::workload::{generate_batch, generate_random_graph};

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_dimacs_g1() {
        let f = write_temp(
            "c tiny instance\n\
             p max 4 5\n\
             n 1 s\n\
             n 4 t\n\
             a 1 2 4\n\
             a 1 3 2\n\
             a 2 3 3\n\
             a 2 4 1\n\
             a 3 4 6\n",
        );
        let g = read_graph(f.path()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.source(), 0);
        assert_eq!(g.sink(), 3);
        assert_eq!(oracle_maxflow(&g).value, 6);
    }

    #[test]
    fn parses_plain_format() {
        let f = write_temp("4 5 1 4\n1 2 4\n1 3 2\n2 3 3\n2 4 1\n3 4 6\n");
        let g = read_graph(f.path()).unwrap();
        assert_eq!(oracle_maxflow(&g).value, 6);
    }

    #[test]
    fn dimacs_roundtrip_preserves_the_instance() {
        let g = generate_random_graph(50, 200, 100, 77).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_dimacs(f.path(), &g).unwrap();
        let reloaded = read_graph(f.path()).unwrap();
        assert_eq!(reloaded.vertex_count(), g.vertex_count());
        assert_eq!(reloaded.source(), g.source());
        assert_eq!(reloaded.sink(), g.sink());
        assert_eq!(oracle_maxflow(&reloaded).value, oracle_maxflow(&g).value);
    }

    #[test]
    fn batch_roundtrip() {
        let g = generate_random_graph(30, 120, 100, 5).unwrap();
        let batch = generate_batch(&g, 20.0, BatchKind::Mixed, 9, 10).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_batch(f.path(), &batch).unwrap();
        let reloaded = read_batch(f.path()).unwrap();
        assert_eq!(reloaded.kind, batch.kind);
        assert_eq!(reloaded.entries, batch.entries);
    }

    #[test]
    fn malformed_files_fail_with_line_numbers() {
        let f = write_temp("p max 4 1\nn 1 s\nn 4 t\na 1 9 5\n");
        assert!(matches!(
            read_dimacs(f.path()),
            Err(Error::Parse { line: 4, .. })
        ));

        let f = write_temp("p max 4 2\nn 1 s\nn 4 t\na 1 2 5\n");
        assert!(read_dimacs(f.path()).is_err(), "arc count mismatch");

        let f = write_temp("u 1 bogus\n1 2 3\n");
        assert!(read_batch(f.path()).is_err());
    }
}
