//! Labeled multigraphs for the coconut / bi-coconut / comb tree families and
//! the cone constructions over them.
//!
//! Vertices carry role labels (path vertex, left/right/comb leaf, cone apex)
//! and are stored in a fixed canonical order: path vertices first, then left
//! leaves, then right (or comb) leaves, with the apex always last. That order
//! is what makes reduced-Laplacian row and column indices reproducible across
//! runs.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::{Error, Result};

/// Role of a vertex within a family graph. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    /// Spine vertex π_i of the underlying path.
    Path(u32),
    /// Leaf σ_(1,i) attached to the first path vertex.
    LeftLeaf(u32),
    /// Leaf σ_(2,j) attached to the last path vertex.
    RightLeaf(u32),
    /// Comb leaf ℓ_i attached to spine vertex π_(i+1).
    CombLeaf(u32),
    /// The cone vertex adjacent to every other vertex.
    Apex,
}

impl VertexLabel {
    /// Identifier usable as a DOT node name.
    pub fn dot_id(&self) -> String {
        match self {
            VertexLabel::Path(i) => format!("pi{i}"),
            VertexLabel::LeftLeaf(i) => format!("sigma1_{i}"),
            VertexLabel::RightLeaf(i) => format!("sigma2_{i}"),
            VertexLabel::CombLeaf(i) => format!("ell{i}"),
            VertexLabel::Apex => "apex".into(),
        }
    }

    fn role_name(&self) -> &'static str {
        match self {
            VertexLabel::Path(_) => "Path",
            VertexLabel::LeftLeaf(_) => "LeftLeaf",
            VertexLabel::RightLeaf(_) => "RightLeaf",
            VertexLabel::CombLeaf(_) => "CombLeaf",
            VertexLabel::Apex => "Apex",
        }
    }

    fn index(&self) -> Option<u32> {
        match self {
            VertexLabel::Path(i)
            | VertexLabel::LeftLeaf(i)
            | VertexLabel::RightLeaf(i)
            | VertexLabel::CombLeaf(i) => Some(*i),
            VertexLabel::Apex => None,
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dot_id())
    }
}

/// Parameters (p, s1, s2) of a bi-coconut tree: a path on p vertices with s1
/// extra leaves on the first path vertex and s2 on the last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub p: u32,
    pub s1: u32,
    pub s2: u32,
}

impl FamilyParams {
    pub fn new(p: u32, s1: u32, s2: u32) -> Self {
        FamilyParams { p, s1, s2 }
    }
}

/// Undirected multigraph with labeled vertices; parallel edges allowed, self
/// loops forbidden. Immutable in ordinary use once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    labels: Vec<VertexLabel>,
    edges: BTreeMap<(usize, usize), u64>,
}

impl Multigraph {
    /// Creates an edgeless graph over the given labels; labels must be unique.
    pub fn new(labels: Vec<VertexLabel>) -> Result<Self> {
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::InvalidParameter("duplicate vertex labels".into()));
        }
        Ok(Multigraph {
            labels,
            edges: BTreeMap::new(),
        })
    }

    /// Adds `mult` parallel edges between distinct vertices `u` and `v`.
    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> Result<()> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange(format!(
                "edge ({u}, {v}) in a graph on {n} vertices"
            )));
        }
        if u == v {
            return Err(Error::InvalidParameter("self-loops are not allowed".into()));
        }
        if mult == 0 {
            return Ok(());
        }
        *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Total number of edge instances, counting multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> VertexLabel {
        self.labels[v]
    }

    /// Index of the vertex carrying `label`, if present.
    pub fn index_of(&self, label: VertexLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Edge multiplicity between two vertices (0 if absent or equal).
    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        if u == v {
            return 0;
        }
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Edges as (smaller index, larger index, multiplicity), in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Degree counting multiplicity.
    pub fn degree(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Neighbors of `v` with their edge multiplicities.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.edges.iter().filter_map(move |(&(a, b), &m)| {
            if a == v {
                Some((b, m))
            } else if b == v {
                Some((a, m))
            } else {
                None
            }
        })
    }

    /// Indices of degree-1 vertices.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) == 1).collect()
    }

    /// Index of the apex vertex, if the graph is a cone.
    pub fn apex(&self) -> Option<usize> {
        self.index_of(VertexLabel::Apex)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (w, _) in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A tree has n−1 edge instances and is connected (so a doubled edge
    /// disqualifies).
    pub fn is_tree(&self) -> bool {
        self.edge_count() == self.vertex_count() as u64 - 1 && self.is_connected()
    }

    /// Copy with vertex `old` moved to index `perm[old]`; `perm` must be a
    /// permutation of 0..n.
    pub fn permuted(&self, perm: &[usize]) -> Result<Multigraph> {
        let n = self.vertex_count();
        let mut check: Vec<usize> = perm.to_vec();
        check.sort_unstable();
        if perm.len() != n || check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let mut labels = vec![VertexLabel::Apex; n];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old];
        }
        let mut out = Multigraph {
            labels,
            edges: BTreeMap::new(),
        };
        for (u, v, m) in self.edges() {
            out.add_edge(perm[u], perm[v], m)?;
        }
        Ok(out)
    }

    /// DOT rendering; parallel edges appear as repeated edge lines.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph {\n");
        for label in &self.labels {
            out.push_str(&format!("  {};\n", label.dot_id()));
        }
        for (u, v, m) in self.edges() {
            for _ in 0..m {
                out.push_str(&format!(
                    "  {} -- {};\n",
                    self.labels[u].dot_id(),
                    self.labels[v].dot_id()
                ));
            }
        }
        out.push_str("}\n");
        out
    }

    /// JSON rendering with explicit vertex roles and edge multiplicities.
    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .labels
            .iter()
            .enumerate()
            .map(|(id, label)| match label.index() {
                Some(index) => json!({"id": id, "role": label.role_name(), "index": index}),
                None => json!({"id": id, "role": label.role_name()}),
            })
            .collect();
        let edges: Vec<Value> = self
            .edges()
            .map(|(u, v, m)| json!({"u": u, "v": v, "mult": m}))
            .collect();
        json!({"vertices": vertices, "edges": edges})
    }
}

/// Bi-coconut tree: a path π_1..π_p with s1 leaves on π_1 and s2 leaves on
/// π_p. Zero leaf counts are accepted (degenerating into coconuts or bare
/// paths); the closed-form verifiers are stricter.
pub fn build_bicoconut(params: FamilyParams) -> Result<Multigraph> {
    let FamilyParams { p, s1, s2 } = params;
    if p < 1 {
        return Err(Error::InvalidParameter("path length p must be at least 1".into()));
    }
    let mut labels = Vec::with_capacity((p + s1 + s2) as usize);
    labels.extend((1..=p).map(VertexLabel::Path));
    labels.extend((1..=s1).map(VertexLabel::LeftLeaf));
    labels.extend((1..=s2).map(VertexLabel::RightLeaf));
    let mut g = Multigraph::new(labels)?;
    let p = p as usize;
    for i in 0..p - 1 {
        g.add_edge(i, i + 1, 1)?;
    }
    for i in 0..s1 as usize {
        g.add_edge(0, p + i, 1)?;
    }
    for j in 0..s2 as usize {
        g.add_edge(p - 1, p + s1 as usize + j, 1)?;
    }
    Ok(g)
}

/// Coconut tree: a path π_1..π_p with s leaves on the last path vertex, so
/// π_1 is the path endpoint away from the leaf cluster. For p ≥ 2 this is
/// isomorphic to a bi-coconut with parameters (p−1, 1, s); for p = 1 it is the
/// star on s+1 vertices.
pub fn build_coconut(p: u32, s: u32) -> Result<Multigraph> {
    if p < 1 || s < 1 {
        return Err(Error::InvalidParameter(
            "coconut tree requires p >= 1 and s >= 1".into(),
        ));
    }
    let mut labels = Vec::with_capacity((p + s) as usize);
    labels.extend((1..=p).map(VertexLabel::Path));
    labels.extend((1..=s).map(VertexLabel::RightLeaf));
    let mut g = Multigraph::new(labels)?;
    let p = p as usize;
    for i in 0..p - 1 {
        g.add_edge(i, i + 1, 1)?;
    }
    for j in 0..s as usize {
        g.add_edge(p - 1, p + j, 1)?;
    }
    Ok(g)
}

/// Left comb: spine π_1..π_p with one leaf ℓ_i hanging off π_(i+1) for each
/// i = 1..p−1, giving 2p−1 vertices and p leaves (the ℓ_i plus π_1).
pub fn build_left_comb(p: u32) -> Result<Multigraph> {
    if p < 2 {
        return Err(Error::InvalidParameter("comb requires p >= 2".into()));
    }
    let mut labels = Vec::with_capacity((2 * p - 1) as usize);
    labels.extend((1..=p).map(VertexLabel::Path));
    labels.extend((1..p).map(VertexLabel::CombLeaf));
    let mut g = Multigraph::new(labels)?;
    let p = p as usize;
    for i in 0..p - 1 {
        g.add_edge(i, i + 1, 1)?;
    }
    for i in 0..p - 1 {
        g.add_edge(p + i, i + 1, 1)?;
    }
    Ok(g)
}

/// Adds an apex vertex joined once to every existing vertex.
pub fn cone(g: &Multigraph) -> Result<Multigraph> {
    if g.apex().is_some() {
        return Err(Error::ApexPresent);
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot cone the empty graph".into()));
    }
    let mut labels = g.labels().to_vec();
    labels.push(VertexLabel::Apex);
    let mut out = Multigraph::new(labels)?;
    for (u, v, m) in g.edges() {
        out.add_edge(u, v, m)?;
    }
    for v in 0..n {
        out.add_edge(v, n, 1)?;
    }
    Ok(out)
}

/// Cone with the apex edge at `v` doubled; `g` must be a tree.
pub fn cone_plus(g: &Multigraph, v: VertexLabel) -> Result<Multigraph> {
    if g.apex().is_some() {
        return Err(Error::ApexPresent);
    }
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let target = g.index_of(v).ok_or(Error::VertexNotFound(v))?;
    let mut out = cone(g)?;
    let apex = out.vertex_count() - 1;
    out.add_edge(target, apex, 1)?;
    Ok(out)
}

/// Removes a leaf from a tree, returning the smaller tree (labels and their
/// relative order preserved) together with the label of the leaf's unique
/// neighbor.
pub fn delete_leaf(t: &Multigraph, leaf: VertexLabel) -> Result<(Multigraph, VertexLabel)> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    let v = t.index_of(leaf).ok_or(Error::VertexNotFound(leaf))?;
    if t.degree(v) != 1 {
        return Err(Error::NotALeaf(leaf));
    }
    let neighbor = t
        .neighbors(v)
        .next()
        .map(|(w, _)| t.label(w))
        .expect("leaf has a neighbor");
    let labels: Vec<VertexLabel> = t
        .labels()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != v)
        .map(|(_, &l)| l)
        .collect();
    let mut out = Multigraph::new(labels)?;
    let remap = |w: usize| if w < v { w } else { w - 1 };
    for (a, b, m) in t.edges() {
        if a != v && b != v {
            out.add_edge(remap(a), remap(b), m)?;
        }
    }
    Ok((out, neighbor))
}
