//! Weighted graphs with a marked origin and target set.
//!
//! A [`WeightedGraph`] is immutable once built. Vertices carry opaque string
//! labels; at construction the labels are sorted (integers numerically, then
//! everything else lexicographically) and that order fixes the integer index
//! used by every solver, so results never depend on input order.
//!
//! The on-disk form is [`GraphFile`], a small JSON document:
//!
//! ```json
//! {
//!   "vertices": ["0", "1", "2"],
//!   "edges": [["0", "1", 1.0], ["1", "2", 1.0]],
//!   "origin": "0",
//!   "targets": ["2"]
//! }
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free-form provenance attached to generated graphs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Number of steps a walk from the origin can take before it could
    /// possibly feel the truncation of an infinite family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl GraphMetadata {
    pub fn new(generator: &str) -> Self {
        Self {
            generator: generator.to_string(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Serialized graph document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
    pub origin: String,
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<GraphMetadata>,
}

fn label_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Merge {
    /// Repeated pairs must carry the same weight.
    Reject,
    /// Repeated pairs are summed.
    Sum,
}

/// Finite graph with symmetric nonnegative weights, an origin `o` and a
/// nonempty target set `z` not containing `o`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    /// Neighbor lists sorted by index; a self-loop appears once.
    adjacency: Vec<Vec<(usize, f64)>>,
    origin: usize,
    targets: Vec<usize>,
    is_target: Vec<bool>,
    metadata: Option<GraphMetadata>,
}

impl WeightedGraph {
    /// Builds a graph from labelled vertices and index-based edges.
    ///
    /// Zero weights are dropped; a pair listed twice must carry the same
    /// weight both times.
    pub fn from_parts(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
        origin: usize,
        targets: Vec<usize>,
        metadata: Option<GraphMetadata>,
    ) -> Result<Self> {
        Self::assemble(labels, edges, origin, targets, metadata, Merge::Reject)
    }

    fn assemble(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
        origin: usize,
        targets: Vec<usize>,
        metadata: Option<GraphMetadata>,
        merge: Merge,
    ) -> Result<Self> {
        let n = labels.len();
        let check = |i: usize| {
            if i < n {
                Ok(())
            } else {
                Err(Error::UnknownVertex(format!("#{i}")))
            }
        };
        check(origin)?;
        if targets.is_empty() {
            return Err(Error::EmptySet);
        }
        for &t in &targets {
            check(t)?;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| label_cmp(&labels[a], &labels[b]));
        for w in order.windows(2) {
            if labels[w[0]] == labels[w[1]] {
                return Err(Error::Malformed(format!(
                    "duplicate vertex label `{}`",
                    labels[w[0]]
                )));
            }
        }
        let mut rank = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }

        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            check(u)?;
            check(v)?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::BadWeight {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                    weight: w,
                });
            }
            if w == 0.0 {
                continue;
            }
            let (a, b) = (rank[u].min(rank[v]), rank[u].max(rank[v]));
            match pairs.get_mut(&(a, b)) {
                None => {
                    pairs.insert((a, b), w);
                }
                Some(prev) => match merge {
                    Merge::Sum => *prev += w,
                    Merge::Reject if *prev == w => {}
                    Merge::Reject => {
                        return Err(Error::AsymmetricDuplicate {
                            u: labels[u].clone(),
                            v: labels[v].clone(),
                            first: *prev,
                            second: w,
                        })
                    }
                },
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for (&(a, b), &w) in &pairs {
            adjacency[a].push((b, w));
            if a != b {
                adjacency[b].push((a, w));
            }
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }

        let mut sorted_labels = vec![String::new(); n];
        for (old, label) in labels.into_iter().enumerate() {
            sorted_labels[rank[old]] = label;
        }
        let origin = rank[origin];
        let mut targets: Vec<usize> = targets.into_iter().map(|t| rank[t]).collect();
        targets.sort_unstable();
        targets.dedup();
        let mut is_target = vec![false; n];
        for &t in &targets {
            is_target[t] = true;
        }
        if is_target[origin] {
            return Err(Error::OriginInTargets(sorted_labels[origin].clone()));
        }

        Ok(Self {
            labels: sorted_labels,
            adjacency,
            origin,
            targets,
            is_target,
            metadata,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of stored undirected pairs, self-loops included.
    pub fn num_edges(&self) -> usize {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().filter(|&&(j, _)| j >= i).count())
            .sum()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .binary_search_by(|probe| label_cmp(probe, label))
            .map_err(|_| Error::UnknownVertex(label.to_string()))
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_target(&self, i: usize) -> bool {
        self.is_target[i]
    }

    pub fn metadata(&self) -> Option<&GraphMetadata> {
        self.metadata.as_ref()
    }

    pub fn with_metadata(mut self, metadata: GraphMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Neighbors of `i` with edge weights, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Edge weight w(x, y); zero when the pair is not an edge.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let row = &self.adjacency[x];
        row.binary_search_by_key(&y, |&(j, _)| j)
            .map(|k| row[k].1)
            .unwrap_or(0.0)
    }

    /// Vertex weight w_x of the vertex at index `i`.
    pub fn weight_of(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum()
    }

    /// Vertex weight w_x: the sum of weights of edges at `x`, a self-loop
    /// counted once.
    pub fn vertex_weight(&self, x: &str) -> Result<f64> {
        Ok(self.weight_of(self.index(x)?))
    }

    /// Weight of a vertex set, the sum of its vertex weights.
    pub fn set_weight(&self, set: &[usize]) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        set.iter()
            .map(|&i| {
                if i < self.num_vertices() {
                    Ok(self.weight_of(i))
                } else {
                    Err(Error::UnknownVertex(format!("#{i}")))
                }
            })
            .sum()
    }

    /// w_z.
    pub fn target_weight(&self) -> f64 {
        self.targets.iter().map(|&t| self.weight_of(t)).sum()
    }

    /// w_V = sum of all vertex weights.
    pub fn total_weight(&self) -> f64 {
        (0..self.num_vertices()).map(|i| self.weight_of(i)).sum()
    }

    /// w_z / w_o.
    pub fn weight_ratio(&self) -> f64 {
        self.target_weight() / self.weight_of(self.origin)
    }

    /// Breadth-first distances from `x` in the support of the weights.
    pub fn distances_from(&self, x: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[x] = Some(0);
        queue.push_back(x);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &(v, _) in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Length of a shortest path from `x` to the set, `None` if unreachable.
    pub fn distance(&self, x: usize, set: &[usize]) -> Result<Option<usize>> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        if x >= self.num_vertices() {
            return Err(Error::UnknownVertex(format!("#{x}")));
        }
        let dist = self.distances_from(x);
        Ok(set
            .iter()
            .filter_map(|&s| dist.get(s).copied().flatten())
            .min())
    }

    /// dist(o, z).
    pub fn origin_target_distance(&self) -> Option<usize> {
        let dist = self.distances_from(self.origin);
        self.targets.iter().filter_map(|&t| dist[t]).min()
    }

    /// Vertices reachable from the origin without entering the target set,
    /// targets excluded.
    pub fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices()];
        let mut stack = vec![self.origin];
        seen[self.origin] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] && !self.is_target[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Whether some target is adjacent to an accessible vertex.
    pub fn target_reachable(&self) -> bool {
        let acc = self.accessible();
        self.targets
            .iter()
            .any(|&t| self.adjacency[t].iter().any(|&(v, _)| acc[v]))
    }

    /// Drops every non-target vertex the origin cannot reach without
    /// passing through the target set. The hitting-time law is unchanged.
    pub fn restrict_accessible(&self) -> WeightedGraph {
        let mut keep = self.accessible();
        for &t in &self.targets {
            keep[t] = true;
        }
        if keep.iter().all(|&k| k) {
            return self.clone();
        }
        self.induced(&keep)
    }

    fn induced(&self, keep: &[bool]) -> WeightedGraph {
        let mut new_index = vec![usize::MAX; self.num_vertices()];
        let mut labels = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = labels.len();
                labels.push(self.labels[i].clone());
            }
        }
        let mut edges = Vec::new();
        for (u, row) in self.adjacency.iter().enumerate() {
            for &(v, w) in row {
                if v >= u && keep[u] && keep[v] {
                    edges.push((new_index[u], new_index[v], w));
                }
            }
        }
        let targets = self.targets.iter().map(|&t| new_index[t]).collect();
        Self::assemble(
            labels,
            edges,
            new_index[self.origin],
            targets,
            self.metadata.clone(),
            Merge::Reject,
        )
        .expect("induced subgraph of a valid graph is valid")
    }

    /// Merges the target set into a single vertex labelled by the first
    /// target. Parallel weights are summed and weights inside the target set,
    /// including target self-loops, are dropped unless nothing else touches
    /// the target. None of this changes the walk before it hits the target.
    pub fn contract_targets(&self) -> WeightedGraph {
        let internal = |u: usize, v: usize| self.is_target[u] && self.is_target[v];
        let has_internal = self
            .targets
            .iter()
            .any(|&t| self.adjacency[t].iter().any(|&(v, _)| self.is_target[v]));
        let has_external = self
            .targets
            .iter()
            .any(|&t| self.adjacency[t].iter().any(|&(v, _)| !self.is_target[v]));
        if self.targets.len() == 1 && !(has_internal && has_external) {
            return self.clone();
        }
        let merged_label = self.labels[self.targets[0]].clone();
        let mut new_index = vec![usize::MAX; self.num_vertices()];
        let mut labels = Vec::new();
        for i in 0..self.num_vertices() {
            if !self.is_target[i] {
                new_index[i] = labels.len();
                labels.push(self.labels[i].clone());
            }
        }
        let z = labels.len();
        labels.push(merged_label);
        for &t in &self.targets {
            new_index[t] = z;
        }
        let mut edges = Vec::new();
        for (u, row) in self.adjacency.iter().enumerate() {
            for &(v, w) in row {
                if v < u || (internal(u, v) && has_external) {
                    continue;
                }
                edges.push((new_index[u], new_index[v], w));
            }
        }
        Self::assemble(
            labels,
            edges,
            new_index[self.origin],
            vec![z],
            self.metadata.clone(),
            Merge::Sum,
        )
        .expect("contraction of a valid graph is valid")
    }

    /// Same weights with a different origin and target set.
    pub fn with_endpoints(&self, origin: &str, targets: &[&str]) -> Result<WeightedGraph> {
        let o = self.index(origin)?;
        let z = targets
            .iter()
            .map(|t| self.index(t))
            .collect::<Result<Vec<_>>>()?;
        if z.is_empty() {
            return Err(Error::EmptySet);
        }
        if z.contains(&o) {
            return Err(Error::OriginInTargets(origin.to_string()));
        }
        let mut is_target = vec![false; self.num_vertices()];
        for &t in &z {
            is_target[t] = true;
        }
        let mut targets = z;
        targets.sort_unstable();
        targets.dedup();
        Ok(WeightedGraph {
            origin: o,
            targets,
            is_target,
            ..self.clone()
        })
    }

    pub fn to_file(&self) -> GraphFile {
        let mut edges = Vec::with_capacity(self.num_edges());
        for (u, row) in self.adjacency.iter().enumerate() {
            for &(v, w) in row {
                if v >= u {
                    edges.push((self.labels[u].clone(), self.labels[v].clone(), w));
                }
            }
        }
        GraphFile {
            vertices: self.labels.clone(),
            edges,
            origin: self.labels[self.origin].clone(),
            targets: self
                .targets
                .iter()
                .map(|&t| self.labels[t].clone())
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn from_file(file: GraphFile) -> Result<WeightedGraph> {
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(file.vertices.len());
        for (i, label) in file.vertices.iter().enumerate() {
            if index.insert(label.as_str(), i).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate vertex label `{label}`"
                )));
            }
        }
        let lookup = |label: &str| {
            index
                .get(label)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(label.to_string()))
        };
        let mut edges = Vec::with_capacity(file.edges.len());
        for (u, v, w) in &file.edges {
            edges.push((lookup(u)?, lookup(v)?, *w));
        }
        let origin = lookup(&file.origin)?;
        let targets = file
            .targets
            .iter()
            .map(|t| lookup(t))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(file.vertices, edges, origin, targets, file.metadata)
    }
}

/// Parses a graph document.
pub fn parse(bytes: &[u8]) -> Result<WeightedGraph> {
    let file: GraphFile =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    WeightedGraph::from_file(file)
}

/// Serializes to the normal form: canonical vertex order, each edge once
/// with its lower-indexed endpoint first.
pub fn serialize(graph: &WeightedGraph) -> String {
    let mut out = serde_json::to_string_pretty(&graph.to_file()).expect("graph file serializes");
    out.push('\n');
    out
}

/// Incremental construction by label.
#[derive(Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    origin: Option<usize>,
    targets: Vec<usize>,
    metadata: Option<GraphMetadata>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, label: impl Into<String>) -> usize {
        let label = label.into();
        if let Some(&i) = self.index.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        i
    }

    pub fn edge(mut self, u: impl Into<String>, v: impl Into<String>, w: f64) -> Self {
        let (u, v) = (self.vertex(u), self.vertex(v));
        self.edges.push((u, v, w));
        self
    }

    pub fn origin(mut self, label: impl Into<String>) -> Self {
        let o = self.vertex(label);
        self.origin = Some(o);
        self
    }

    pub fn target(mut self, label: impl Into<String>) -> Self {
        let t = self.vertex(label);
        self.targets.push(t);
        self
    }

    pub fn metadata(mut self, metadata: GraphMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        let origin = self
            .origin
            .ok_or_else(|| Error::Malformed("missing origin".into()))?;
        WeightedGraph::from_parts(self.labels, self.edges, origin, self.targets, self.metadata)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b = b.edge(i.to_string(), (i + 1).to_string(), 1.0);
        }
        b.origin("0").target(n.to_string()).build().unwrap()
    }

    #[test]
    fn vertex_and_set_weights() {
        let g = path(4);
        assert_eq!(g.vertex_weight("1").unwrap(), 2.0);
        assert_eq!(g.vertex_weight("0").unwrap(), 1.0);
        assert!(matches!(g.vertex_weight("9"), Err(Error::UnknownVertex(_))));
        let all: Vec<usize> = (0..g.num_vertices()).collect();
        assert_eq!(g.set_weight(&all).unwrap(), 8.0);
        assert!(matches!(g.set_weight(&[]), Err(Error::EmptySet)));
    }

    #[test]
    fn biased_vertex_weight() {
        let g = GraphBuilder::new()
            .edge("0", "1", 1.0)
            .edge("1", "2", 3.0)
            .origin("0")
            .target("2")
            .build()
            .unwrap();
        assert_eq!(g.vertex_weight("1").unwrap(), 4.0);
    }

    #[test]
    fn self_loop_counted_once() {
        let g = GraphBuilder::new()
            .edge("a", "a", 2.5)
            .edge("a", "b", 1.0)
            .origin("a")
            .target("b")
            .build()
            .unwrap();
        assert_eq!(g.vertex_weight("a").unwrap(), 3.5);
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn natural_label_order() {
        let g = path(11);
        assert_eq!(g.label(2), "2");
        assert_eq!(g.label(10), "10");
        assert_eq!(g.index("10").unwrap(), 10);
    }

    #[test]
    fn distances() {
        let g = path(5);
        assert_eq!(g.distance(0, &[5]).unwrap(), Some(5));
        assert_eq!(g.distance(3, &[3]).unwrap(), Some(0));
        let split = GraphBuilder::new()
            .edge("0", "1", 1.0)
            .edge("2", "3", 1.0)
            .origin("0")
            .target("3")
            .build()
            .unwrap();
        assert_eq!(split.origin_target_distance(), None);
        assert!(!split.target_reachable());
    }

    #[test]
    fn contraction_merges_targets() {
        let g = GraphBuilder::new()
            .edge("c", "a", 1.0)
            .edge("c", "b", 2.0)
            .edge("a", "b", 5.0)
            .edge("c", "o", 1.0)
            .origin("o")
            .target("a")
            .target("b")
            .build()
            .unwrap();
        let c = g.contract_targets();
        assert_eq!(c.num_vertices(), 3);
        assert_eq!(c.targets().len(), 1);
        let z = c.targets()[0];
        assert_eq!(c.weight(c.index("c").unwrap(), z), 3.0);
        assert_eq!(c.target_weight(), 3.0);
        let single = path(3);
        assert_eq!(single.contract_targets(), single);
        let looped = GraphBuilder::new()
            .edge("o", "z", 2.0)
            .edge("z", "z", 7.0)
            .origin("o")
            .target("z")
            .build()
            .unwrap();
        assert_eq!(looped.target_weight(), 9.0);
        assert_eq!(looped.contract_targets().target_weight(), 2.0);
    }

    #[test]
    fn restriction_drops_unreachable_parts() {
        let g = GraphBuilder::new()
            .edge("0", "1", 1.0)
            .edge("1", "2", 1.0)
            .edge("2", "p", 1.0)
            .edge("x", "y", 1.0)
            .origin("0")
            .target("2")
            .build()
            .unwrap();
        let r = g.restrict_accessible();
        assert_eq!(r.labels(), &["0", "1", "2"]);
        assert_eq!(path(4).restrict_accessible(), path(4));
    }

    #[test]
    fn parse_errors() {
        let neg =
            br#"{"vertices":["a","b"],"edges":[["a","b",-1.0]],"origin":"a","targets":["b"]}"#;
        assert!(matches!(parse(neg), Err(Error::BadWeight { .. })));
        let dup = br#"{"vertices":["a","b"],"edges":[["a","b",1.0],["b","a",2.0]],"origin":"a","targets":["b"]}"#;
        assert!(matches!(parse(dup), Err(Error::AsymmetricDuplicate { .. })));
        let mirror = br#"{"vertices":["a","b"],"edges":[["a","b",1.0],["b","a",1.0]],"origin":"a","targets":["b"]}"#;
        assert_eq!(parse(mirror).unwrap().num_edges(), 1);
        let no_origin = br#"{"vertices":["a","b"],"edges":[["a","b",1.0]],"targets":["b"]}"#;
        assert!(matches!(parse(no_origin), Err(Error::Malformed(_))));
        let no_targets =
            br#"{"vertices":["a","b"],"edges":[["a","b",1.0]],"origin":"a","targets":[]}"#;
        assert!(matches!(parse(no_targets), Err(Error::EmptySet)));
        let o_in_z =
            br#"{"vertices":["a","b"],"edges":[["a","b",1.0]],"origin":"a","targets":["a"]}"#;
        assert!(matches!(parse(o_in_z), Err(Error::OriginInTargets(_))));
        let stray = br#"{"vertices":["a"],"edges":[["a","q",1.0]],"origin":"a","targets":["a"]}"#;
        assert!(matches!(parse(stray), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn zero_weights_dropped() {
        let doc = br#"{"vertices":["a","b","c"],"edges":[["a","b",1.0],["b","c",0.0],["a","c",2.0]],"origin":"a","targets":["c"]}"#;
        let g = parse(doc).unwrap();
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn serialize_normal_form() {
        let doc = br#"{"vertices":["2","0","1"],"edges":[["2","1",1.5],["1","0",1.0]],"origin":"0","targets":["2"]}"#;
        let g = parse(doc).unwrap();
        let text = serialize(&g);
        let again = serialize(&parse(text.as_bytes()).unwrap());
        assert_eq!(text, again);
        let file: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.vertices, vec!["0", "1", "2"]);
        assert_eq!(file.edges[0], ("0".into(), "1".into(), 1.0));
    }
}
