//! Graph file formats: Pajek, Matrix Market, and TSV edge lists.
//!
//! All formats use 1-based node indices externally. Self-loops are counted
//! and dropped on load; duplicate edge lines are merged (last occurrence
//! wins) with a warning counter, except for Pajek `*Arcs` pairs where the
//! maximum of the two directed weights is kept.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::graph::Graph;
use crate::{Error, Result};

/// Supported graph file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Pajek,
    MatrixMarket,
    EdgeList,
}

impl GraphFormat {
    pub fn from_name(name: &str) -> Result<GraphFormat> {
        match name.to_ascii_lowercase().as_str() {
            "pajek" | "net" | "paj" => Ok(GraphFormat::Pajek),
            "matrix-market" | "matrixmarket" | "mm" | "mtx" => Ok(GraphFormat::MatrixMarket),
            "edge-list" | "edgelist" | "tsv" => Ok(GraphFormat::EdgeList),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }

    pub fn from_path(path: &Path) -> Result<GraphFormat> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        match ext.as_str() {
            "net" | "paj" | "pajek" => Ok(GraphFormat::Pajek),
            "mtx" | "mm" => Ok(GraphFormat::MatrixMarket),
            "tsv" | "txt" | "edges" | "edgelist" => Ok(GraphFormat::EdgeList),
            other => Err(Error::UnknownFormat(format!(
                "cannot infer format from extension {:?}",
                other
            ))),
        }
    }
}

/// What the loader cleaned up while reading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Self-loop entries dropped.
    pub self_loops: usize,
    /// Duplicate edge lines merged.
    pub duplicate_edges: usize,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Accumulates symmetrized edges with the loader cleanup rules.
struct EdgeAccumulator {
    n: usize,
    map: BTreeMap<(usize, usize), f64>,
    report: LoadReport,
}

impl EdgeAccumulator {
    fn new(n: usize) -> EdgeAccumulator {
        EdgeAccumulator {
            n,
            map: BTreeMap::new(),
            report: LoadReport::default(),
        }
    }

    fn check(&self, line: usize, i: usize, j: usize, w: f64) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(parse_err(line, format!("node index {} out of range", i)));
        }
        if j == 0 || j > self.n {
            return Err(parse_err(line, format!("node index {} out of range", j)));
        }
        if !w.is_finite() || w <= 0.0 {
            return Err(parse_err(line, format!("nonpositive weight {}", w)));
        }
        Ok(())
    }

    /// Undirected edge line: last occurrence wins.
    fn add_edge(&mut self, line: usize, i: usize, j: usize, w: f64) -> Result<()> {
        self.check(line, i, j, w)?;
        if i == j {
            self.report.self_loops += 1;
            return Ok(());
        }
        let key = (i.min(j) - 1, i.max(j) - 1);
        if self.map.insert(key, w).is_some() {
            self.report.duplicate_edges += 1;
        }
        Ok(())
    }

    /// Directed arc line: (i,j) and (j,i) merge keeping the larger weight.
    fn add_arc(&mut self, line: usize, i: usize, j: usize, w: f64) -> Result<()> {
        self.check(line, i, j, w)?;
        if i == j {
            self.report.self_loops += 1;
            return Ok(());
        }
        let key = (i.min(j) - 1, i.max(j) - 1);
        match self.map.get_mut(&key) {
            Some(existing) => {
                self.report.duplicate_edges += 1;
                if w > *existing {
                    *existing = w;
                }
            }
            None => {
                self.map.insert(key, w);
            }
        }
        Ok(())
    }

    fn finish(self, labels: Option<Vec<String>>) -> Result<(Graph, LoadReport)> {
        let mut g = Graph::from_edges(self.n, self.map.into_iter().map(|((i, j), w)| (i, j, w)))?;
        if let Some(labels) = labels {
            g.set_labels(labels)?;
        }
        Ok((g, self.report))
    }
}

fn parse_index(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected node index, got {:?}", tok)))
}

fn parse_weight(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("expected weight, got {:?}", tok)))
}

#[derive(PartialEq, Clone, Copy)]
enum PajekSection {
    Vertices,
    Edges,
    Arcs,
    EdgesList,
    ArcsList,
}

/// Parses the Pajek subset: `%` comments, `*Vertices N`, vertex lines
/// `id [label]`, and `*Edges` / `*Arcs` sections with `i j [w]` lines.
/// Adjacency-list sections (`*Edgeslist` / `*Arcslist`) are also accepted
/// since several published data sets use them.
pub fn load_pajek(text: &str) -> Result<(Graph, LoadReport)> {
    let mut n: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut acc: Option<EdgeAccumulator> = None;
    let mut section: Option<PajekSection> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('*') {
            let mut toks = rest.split_whitespace();
            let keyword = toks
                .next()
                .ok_or_else(|| parse_err(lineno, "empty section header"))?
                .to_ascii_lowercase();
            section = Some(match keyword.as_str() {
                "vertices" => {
                    let count = toks
                        .next()
                        .ok_or_else(|| parse_err(lineno, "*Vertices requires a count"))?;
                    let count = parse_index(lineno, count)?;
                    n = Some(count);
                    labels = vec![None; count];
                    acc = Some(EdgeAccumulator::new(count));
                    PajekSection::Vertices
                }
                "edges" => PajekSection::Edges,
                "arcs" => PajekSection::Arcs,
                "edgeslist" => PajekSection::EdgesList,
                "arcslist" => PajekSection::ArcsList,
                other => {
                    return Err(parse_err(
                        lineno,
                        format!("unsupported Pajek section *{}", other),
                    ))
                }
            });
            if section != Some(PajekSection::Vertices) && acc.is_none() {
                return Err(parse_err(lineno, "edge section before *Vertices header"));
            }
            continue;
        }
        match section {
            None => return Err(parse_err(lineno, "data line before any section header")),
            Some(PajekSection::Vertices) => {
                let nn = n.expect("section implies header parsed");
                let mut toks = raw.trim().splitn(2, char::is_whitespace);
                let id = parse_index(lineno, toks.next().unwrap_or(""))?;
                if id == 0 || id > nn {
                    return Err(parse_err(lineno, format!("vertex id {} out of range", id)));
                }
                if let Some(rest) = toks.next() {
                    let label = rest.trim().trim_matches('"').to_string();
                    if !label.is_empty() {
                        labels[id - 1] = Some(label);
                    }
                }
            }
            Some(PajekSection::Edges) | Some(PajekSection::Arcs) => {
                let acc = acc.as_mut().expect("section implies header parsed");
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(parse_err(lineno, "edge line needs at least two indices"));
                }
                let i = parse_index(lineno, toks[0])?;
                let j = parse_index(lineno, toks[1])?;
                let w = if toks.len() > 2 {
                    parse_weight(lineno, toks[2])?
                } else {
                    1.0
                };
                if section == Some(PajekSection::Edges) {
                    acc.add_edge(lineno, i, j, w)?;
                } else {
                    acc.add_arc(lineno, i, j, w)?;
                }
            }
            Some(PajekSection::EdgesList) | Some(PajekSection::ArcsList) => {
                let acc = acc.as_mut().expect("section implies header parsed");
                let mut toks = line.split_whitespace();
                let i = parse_index(lineno, toks.next().unwrap_or(""))?;
                for tok in toks {
                    let j = parse_index(lineno, tok)?;
                    if section == Some(PajekSection::EdgesList) {
                        acc.add_edge(lineno, i, j, 1.0)?;
                    } else {
                        acc.add_arc(lineno, i, j, 1.0)?;
                    }
                }
            }
        }
    }

    let acc = acc.ok_or_else(|| parse_err(0, "missing *Vertices header"))?;
    let labels = if labels.iter().any(Option::is_some) {
        Some(
            labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string()))
                .collect(),
        )
    } else {
        None
    };
    acc.finish(labels)
}

/// Parses Matrix Market `coordinate real symmetric` and
/// `coordinate pattern symmetric` files.
pub fn load_matrix_market(text: &str) -> Result<(Graph, LoadReport)> {
    let mut lines = text.lines().enumerate();
    let (idx, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty Matrix Market file"))?;
    let toks: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if toks.len() < 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(idx + 1, "malformed Matrix Market header"));
    }
    if toks[2] != "coordinate" {
        return Err(parse_err(idx + 1, "only coordinate format is supported"));
    }
    let pattern = match toks[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => {
            return Err(parse_err(
                idx + 1,
                format!("unsupported field type {:?}", other),
            ))
        }
    };
    if toks[4] != "symmetric" {
        return Err(parse_err(idx + 1, "only symmetric matrices are supported"));
    }

    let mut acc: Option<EdgeAccumulator> = None;
    let mut expected_nnz = 0usize;
    let mut seen_nnz = 0usize;
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match acc {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(lineno, "size line must be `rows cols nnz`"));
                }
                let rows = parse_index(lineno, toks[0])?;
                let cols = parse_index(lineno, toks[1])?;
                expected_nnz = toks[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad entry count"))?;
                if rows != cols {
                    return Err(parse_err(lineno, "adjacency matrix must be square"));
                }
                acc = Some(EdgeAccumulator::new(rows));
            }
            Some(ref mut acc) => {
                let need = if pattern { 2 } else { 3 };
                if toks.len() < need {
                    return Err(parse_err(lineno, "entry line too short"));
                }
                let i = parse_index(lineno, toks[0])?;
                let j = parse_index(lineno, toks[1])?;
                let w = if pattern {
                    1.0
                } else {
                    parse_weight(lineno, toks[2])?
                };
                acc.add_edge(lineno, i, j, w)?;
                seen_nnz += 1;
            }
        }
    }
    let acc = acc.ok_or_else(|| parse_err(0, "missing size line"))?;
    if seen_nnz != expected_nnz {
        return Err(parse_err(
            0,
            format!("expected {} entries, found {}", expected_nnz, seen_nnz),
        ));
    }
    acc.finish(None)
}

/// Parses a whitespace-separated edge list, one `i j [w]` per line, with
/// `#` comments. The node count is the largest index seen.
pub fn load_edge_list(text: &str) -> Result<(Graph, LoadReport)> {
    let mut parsed: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(parse_err(lineno, "edge line needs two indices"));
        }
        let i = parse_index(lineno, toks[0])?;
        let j = parse_index(lineno, toks[1])?;
        let w = if toks.len() > 2 {
            parse_weight(lineno, toks[2])?
        } else {
            1.0
        };
        if i == 0 || j == 0 {
            return Err(parse_err(lineno, "node indices are 1-based"));
        }
        n = n.max(i).max(j);
        parsed.push((lineno, i, j, w));
    }
    let mut acc = EdgeAccumulator::new(n);
    for (lineno, i, j, w) in parsed {
        acc.add_edge(lineno, i, j, w)?;
    }
    acc.finish(None)
}

/// Loads a graph in the given format.
pub fn load_graph(text: &str, format: GraphFormat) -> Result<(Graph, LoadReport)> {
    match format {
        GraphFormat::Pajek => load_pajek(text),
        GraphFormat::MatrixMarket => load_matrix_market(text),
        GraphFormat::EdgeList => load_edge_list(text),
    }
}

/// Loads a graph from a file, inferring the format from the extension.
pub fn load_graph_path(path: &Path) -> Result<(Graph, LoadReport)> {
    let format = GraphFormat::from_path(path)?;
    let text = std::fs::read_to_string(path)?;
    load_graph(&text, format)
}

/// Serializes a graph. Weights are written with `Display`, which round-trips
/// `f64` values exactly.
pub fn save_graph(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Pajek => save_pajek(g),
        GraphFormat::MatrixMarket => save_matrix_market(g),
        GraphFormat::EdgeList => save_edge_list(g),
    }
}

fn save_pajek(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", g.n());
    if let Some(labels) = g.labels() {
        for (i, label) in labels.iter().enumerate() {
            let _ = writeln!(out, "{} \"{}\"", i + 1, label);
        }
    }
    out.push_str("*Edges\n");
    let weighted = g.is_weighted();
    for &(i, j, w) in g.entries() {
        if weighted {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
        } else {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
    }
    out
}

fn save_matrix_market(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", g.n(), g.n(), g.edge_count());
    for &(i, j, w) in g.entries() {
        // lower triangle convention: row index >= column index
        let _ = writeln!(out, "{} {} {}", j + 1, i + 1, w);
    }
    out
}

fn save_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let weighted = g.is_weighted();
    for &(i, j, w) in g.entries() {
        if weighted {
            let _ = writeln!(out, "{}\t{}\t{}", i + 1, j + 1, w);
        } else {
            let _ = writeln!(out, "{}\t{}", i + 1, j + 1);
        }
    }
    out
}

/// Writes a symmetric dense matrix as Matrix Market coordinate data,
/// keeping entries with `|v| > tol` from the lower triangle.
pub fn save_symmetric_matrix(m: &DMatrix<f64>, tol: f64) -> String {
    let n = m.nrows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            if m[(i, j)].abs() > tol {
                entries.push((i + 1, j + 1, m[(i, j)]));
            }
        }
    }
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", n, n, entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {}", i, j, v);
    }
    out
}

/// Serializes a node permutation: line `i` holds the new (1-based) position
/// of original node `i`.
pub fn save_permutation(p: &crate::graph::NodePermutation) -> String {
    let mut out = String::from("% line i: new position of original node i (1-based)\n");
    for i in 0..p.len() {
        let _ = writeln!(out, "{}", p.apply(i) + 1);
    }
    out
}

pub fn load_permutation(text: &str) -> Result<crate::graph::NodePermutation> {
    let mut map = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let v = parse_index(idx + 1, line)?;
        if v == 0 {
            return Err(parse_err(idx + 1, "positions are 1-based"));
        }
        map.push(v - 1);
    }
    crate::graph::NodePermutation::new(map)
}

/// Serializes a partition: line `i` holds the set label (1 or 2) of node `i`.
pub fn save_partition(part: &crate::graph::Partition) -> String {
    let mut out = format!(
        "% set label (1 or 2) per node; n1 = {}, n2 = {}\n",
        part.n1, part.n2
    );
    for i in 0..part.len() {
        let _ = writeln!(out, "{}", part.label(i));
    }
    out
}

pub fn load_partition(text: &str) -> Result<crate::graph::Partition> {
    let mut membership = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let v: u8 = line
            .parse()
            .map_err(|_| parse_err(idx + 1, format!("bad label {:?}", line)))?;
        membership.push(v);
    }
    crate::graph::Partition::from_membership(membership).map_err(|e| match e {
        Error::InvalidOptions(msg) => parse_err(0, msg),
        other => other,
    })
}

/// Writes a dense matrix as Matrix Market `array real general`
/// (column-major), used for debugging dumps.
pub fn save_dense_array(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let _ = writeln!(out, "{}", m[(i, j)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_pajek_file() {
        let (g, report) = load_pajek("*Vertices 2\n1\n2\n*Edges\n1 2 1\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.entries(), &[(0, 1, 1.0)]);
        assert_eq!(report, LoadReport::default());
    }

    #[test]
    fn pajek_keywords_case_insensitive() {
        let (g, _) = load_pajek("% comment\n*VERTICES 3\n*edges\n1 2\n2 3\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(!g.is_weighted());
    }

    #[test]
    fn pajek_self_loops_counted_and_dropped() {
        let (g, report) = load_pajek("*Vertices 2\n*Edges\n1 1 2\n1 2 1\n2 2 5\n").unwrap();
        assert_eq!(report.self_loops, 2);
        assert_eq!(g.entries(), &[(0, 1, 1.0)]);
    }

    #[test]
    fn pajek_arcs_merge_by_max() {
        let (g, report) = load_pajek("*Vertices 2\n*Arcs\n1 2 3\n2 1 7\n").unwrap();
        assert_eq!(g.entries(), &[(0, 1, 7.0)]);
        assert_eq!(report.duplicate_edges, 1);
    }

    #[test]
    fn pajek_duplicate_edges_last_wins() {
        let (g, report) = load_pajek("*Vertices 2\n*Edges\n1 2 3\n1 2 4\n").unwrap();
        assert_eq!(g.entries(), &[(0, 1, 4.0)]);
        assert_eq!(report.duplicate_edges, 1);
    }

    #[test]
    fn pajek_labels() {
        let (g, _) = load_pajek("*Vertices 2\n1 \"alpha\"\n2 \"beta\"\n*Edges\n1 2\n").unwrap();
        assert_eq!(g.labels().unwrap(), &["alpha".to_string(), "beta".to_string()]);
    }

    #[test]
    fn pajek_edgeslist_section() {
        let (g, _) = load_pajek("*Vertices 3\n*Edgeslist\n1 2 3\n").unwrap();
        assert_eq!(g.entries(), &[(0, 1, 1.0), (0, 2, 1.0)]);
    }

    #[test]
    fn pajek_errors_carry_line_numbers() {
        let err = load_pajek("*Vertices 2\n*Edges\n1 5 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {:?}", other),
        }
        assert!(load_pajek("*Vertices 2\n*Edges\n1 2 -1\n").is_err());
        assert!(load_pajek("*Edges\n1 2\n").is_err());
    }

    #[test]
    fn matrix_market_three_entries() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n\
                    % a comment\n\
                    3 3 3\n2 1 1.5\n3 1 2\n3 2 0.25\n";
        let (g, _) = load_matrix_market(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.entries(), &[(0, 1, 1.5), (0, 2, 2.0), (1, 2, 0.25)]);
    }

    #[test]
    fn matrix_market_pattern() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n";
        let (g, _) = load_matrix_market(text).unwrap();
        assert_eq!(g.entries(), &[(0, 1, 1.0)]);
        assert!(!g.is_weighted());
    }

    #[test]
    fn matrix_market_rejects_general() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n2 1 1\n";
        assert!(load_matrix_market(text).is_err());
    }

    #[test]
    fn edge_list_path_graph() {
        let (g, _) = load_edge_list("1 2\n2 3\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.entries(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn edge_list_comments_and_weights() {
        let (g, _) = load_edge_list("# header\n1\t2\t0.5\n").unwrap();
        assert_eq!(g.entries(), &[(0, 1, 0.5)]);
    }

    #[test]
    fn roundtrip_all_formats() {
        let g = Graph::from_edges(4, [(0, 1, 0.1), (1, 2, 2.0), (2, 3, 37.5)]).unwrap();
        for format in [
            GraphFormat::Pajek,
            GraphFormat::MatrixMarket,
            GraphFormat::EdgeList,
        ] {
            let text = save_graph(&g, format);
            let (back, report) = load_graph(&text, format).unwrap();
            assert_eq!(back, g, "format {:?}", format);
            assert_eq!(report, LoadReport::default());
        }
    }

    #[test]
    fn roundtrip_preserves_exact_weights() {
        // weights that are not exactly representable in decimal still
        // round-trip because Display prints the shortest exact form
        let g = Graph::from_edges(2, [(0, 1, 0.1f64 + 0.2f64)]).unwrap();
        let text = save_graph(&g, GraphFormat::EdgeList);
        let (back, _) = load_graph(&text, GraphFormat::EdgeList).unwrap();
        assert_eq!(back.entries()[0].2.to_bits(), g.entries()[0].2.to_bits());
    }
}
