//! Directed network ingestion and node subsets.
//!
//! A [`DirectedGraph`] stores adjacency twice, as CSR arrays over out-links
//! and over in-links. Internal ids are dense `0..n_nodes` and are assigned in
//! ascending order of the original ids, so the mapping does not depend on the
//! order of lines in the input file.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    /// Sorted ascending; position is the internal id.
    external_ids: Vec<u64>,
    labels: Vec<Option<String>>,
    title_index: HashMap<String, NodeId>,
}

impl DirectedGraph {
    /// Builds a graph over internal ids `0..n_nodes`. Original ids equal the
    /// internal ones.
    pub fn from_edges<I>(n_nodes: usize, edges: I, keep_self_loops: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n_nodes as u64 > NodeId::MAX as u64 {
            return Err(Error::TooManyNodes(n_nodes as u64));
        }
        let mut pairs = Vec::new();
        for (s, d) in edges {
            if s as usize >= n_nodes || d as usize >= n_nodes {
                return Err(Error::InvalidArgument(format!(
                    "edge {s}->{d} outside 0..{n_nodes}"
                )));
            }
            pairs.push((s, d));
        }
        Ok(Self::build(
            (0..n_nodes as u64).collect(),
            pairs,
            keep_self_loops,
        ))
    }

    fn build(external_ids: Vec<u64>, mut pairs: Vec<(NodeId, NodeId)>, keep_self_loops: bool) -> Self {
        let n = external_ids.len();
        if !keep_self_loops {
            pairs.retain(|&(s, d)| s != d);
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_counts = vec![0usize; n + 1];
        for &(s, d) in &pairs {
            out_offsets[s as usize + 1] += 1;
            in_counts[d as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_counts[i + 1] += in_counts[i];
        }
        let out_targets: Vec<NodeId> = pairs.iter().map(|&(_, d)| d).collect();

        // Pairs are sorted by source, so each in-list fills in ascending order.
        let in_offsets = in_counts.clone();
        let mut cursor = in_counts;
        let mut in_sources = vec![0; pairs.len()];
        for &(s, d) in &pairs {
            let slot = &mut cursor[d as usize];
            in_sources[*slot] = s;
            *slot += 1;
        }

        DirectedGraph {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            external_ids,
            labels: vec![None; n],
            title_index: HashMap::new(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.external_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_links(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    pub fn in_links(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    pub fn is_dangling(&self, node: NodeId) -> bool {
        self.out_degree(node) == 0
    }

    /// All edges as `(source, target)` in source-major order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n_nodes() as NodeId)
            .flat_map(move |s| self.out_links(s).iter().map(move |&d| (s, d)))
    }

    pub fn external_id(&self, node: NodeId) -> u64 {
        self.external_ids[node as usize]
    }

    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.external_ids
            .binary_search(&external)
            .ok()
            .map(|i| i as NodeId)
    }

    pub fn label(&self, node: NodeId) -> Option<&str> {
        self.labels[node as usize].as_deref()
    }

    pub fn node_by_title(&self, title: &str) -> Option<NodeId> {
        self.title_index.get(title).copied()
    }

    /// Label if present, otherwise the original id.
    pub fn display_name(&self, node: NodeId) -> String {
        match self.label(node) {
            Some(t) => t.to_string(),
            None => self.external_id(node).to_string(),
        }
    }

    /// Attaches `(original id, title)` pairs. Ids absent from the graph are
    /// reported, not rejected.
    pub fn with_labels<I>(mut self, entries: I) -> Result<(Self, LabelReport)>
    where
        I: IntoIterator<Item = (u64, String)>,
    {
        let mut report = LabelReport::default();
        let mut seen_titles: HashMap<String, u64> = HashMap::new();
        for (ext, title) in entries {
            if let Some(&prev) = seen_titles.get(&title) {
                if prev != ext {
                    return Err(Error::AmbiguousLabel {
                        title,
                        first: prev,
                        second: ext,
                    });
                }
                continue;
            }
            seen_titles.insert(title.clone(), ext);
            match self.internal_id(ext) {
                Some(node) => {
                    if let Some(old) = self.labels[node as usize].replace(title.clone()) {
                        self.title_index.remove(&old);
                    }
                    self.title_index.insert(title, node);
                    report.attached += 1;
                }
                None => {
                    log::warn!("label for unknown node id {ext} ignored");
                    report.unknown_ids.push(ext);
                }
            }
        }
        Ok((self, report))
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct LabelReport {
    pub attached: usize,
    pub unknown_ids: Vec<u64>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Parses a `# nodes=<N>` header comment.
fn declared_nodes(comment: &str) -> Option<u64> {
    comment
        .trim_start_matches('#')
        .trim()
        .strip_prefix("nodes=")
        .and_then(|v| v.trim().parse().ok())
}

/// Reads a whitespace-separated `src dst` edge list.
pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path, keep_self_loops: bool) -> Result<DirectedGraph> {
    let mut declared: Option<u64> = None;
    let mut raw: Vec<(u64, u64)> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(n) = declared_nodes(line) {
                declared = Some(n);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                path: path.into(),
                line: lineno,
                msg: format!("expected two node ids, got {line:?}"),
            });
        };
        let parse = |tok: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|e| match e.kind() {
                std::num::IntErrorKind::PosOverflow => Error::IdOverflow {
                    path: path.into(),
                    line: lineno,
                },
                _ => Error::Parse {
                    path: path.into(),
                    line: lineno,
                    msg: format!("invalid node id {tok:?}"),
                },
            })
        };
        raw.push((parse(a)?, parse(b)?));
    }

    if raw.is_empty() && declared.unwrap_or(0) == 0 {
        return Err(Error::EmptyInput(path.into()));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(s, d)| [s, d]).collect();
    if let Some(n) = declared {
        ids.extend(0..n);
    }
    ids.sort_unstable();
    ids.dedup();
    if ids.len() as u64 > NodeId::MAX as u64 {
        return Err(Error::TooManyNodes(ids.len() as u64));
    }

    let remap = |x: u64| ids.binary_search(&x).expect("id collected above") as NodeId;
    let pairs = raw.iter().map(|&(s, d)| (remap(s), remap(d))).collect();
    drop(raw);
    Ok(DirectedGraph::build(ids, pairs, keep_self_loops))
}

pub fn load_edge_list(path: impl AsRef<Path>, keep_self_loops: bool) -> Result<DirectedGraph> {
    let path = path.as_ref();
    parse_edge_list(open(path)?, path, keep_self_loops)
}

/// Reads `<id>\t<title>` lines.
pub fn parse_labels<R: BufRead>(reader: R, path: &Path) -> Result<Vec<(u64, String)>> {
    let mut out = Vec::new();
    let mut by_id: HashMap<u64, usize> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |msg: String| Error::Parse {
            path: path.into(),
            line: lineno,
            msg,
        };
        let (id, title) = line
            .split_once('\t')
            .ok_or_else(|| malformed(format!("expected <id>\\t<title>, got {line:?}")))?;
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| malformed(format!("invalid node id {id:?}")))?;
        let title = title.trim();
        if title.is_empty() {
            return Err(malformed("empty title".into()));
        }
        if let Some(&prev) = by_id.get(&id) {
            let (_, prev_title): &(u64, String) = &out[prev];
            if prev_title != title {
                return Err(malformed(format!(
                    "id {id} already labeled {prev_title:?}"
                )));
            }
            continue;
        }
        by_id.insert(id, out.len());
        out.push((id, title.to_string()));
    }
    Ok(out)
}

pub fn load_labels(path: impl AsRef<Path>, graph: DirectedGraph) -> Result<(DirectedGraph, LabelReport)> {
    let path = path.as_ref();
    let entries = parse_labels(open(path)?, path)?;
    graph.with_labels(entries)
}

/// Ordered selection of nodes. The order is the row/column order of every
/// reduced matrix built from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSubset {
    indices: Vec<NodeId>,
    names: Vec<String>,
}

impl NodeSubset {
    pub fn new(graph: &DirectedGraph, indices: Vec<NodeId>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty subset".into()));
        }
        let mut seen = vec![false; graph.n_nodes()];
        for &i in &indices {
            let slot = seen.get_mut(i as usize).ok_or_else(|| {
                Error::InvalidArgument(format!("node {i} outside graph of {} nodes", graph.n_nodes()))
            })?;
            if std::mem::replace(slot, true) {
                return Err(Error::DuplicateEntry(graph.display_name(i)));
            }
        }
        let names = indices.iter().map(|&i| graph.display_name(i)).collect();
        Ok(NodeSubset { indices, names })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[NodeId] {
        &self.indices
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Resolves titles, or `@<original id>` entries, against `graph`.
pub fn resolve_subset<S: AsRef<str>>(entries: &[S], graph: &DirectedGraph) -> Result<NodeSubset> {
    let mut misses = Vec::new();
    let mut indices = Vec::with_capacity(entries.len());
    let mut names = Vec::with_capacity(entries.len());
    let mut taken: HashMap<NodeId, ()> = HashMap::new();

    for entry in entries {
        let entry = entry.as_ref();
        let found = match entry.strip_prefix('@') {
            Some(id) => id
                .trim()
                .parse::<u64>()
                .ok()
                .and_then(|ext| graph.internal_id(ext)),
            None => graph.node_by_title(entry),
        };
        match found {
            Some(node) => {
                if taken.insert(node, ()).is_some() {
                    return Err(Error::DuplicateEntry(entry.to_string()));
                }
                indices.push(node);
                names.push(match entry.strip_prefix('@') {
                    Some(_) => graph.display_name(node),
                    None => entry.to_string(),
                });
            }
            None => misses.push(entry.to_string()),
        }
    }
    if !misses.is_empty() {
        return Err(Error::Unresolved(misses));
    }
    if indices.is_empty() {
        return Err(Error::InvalidArgument("empty subset".into()));
    }
    Ok(NodeSubset { indices, names })
}

/// One entry per non-blank line.
pub fn read_subset_file(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let entry = line.trim();
        if !entry.is_empty() {
            out.push(entry.to_string());
        }
    }
    Ok(out)
}
